//! Shared fixtures for the criterion benches.

use iis_core::optimizer::{specialize, DescendantIndex, SpecializationTable};
use iis_core::tasks::Task;
use iis_core::{Complex, Tower};

pub fn renaming_tower() -> Tower {
    Tower::build(&Complex::standard(2), 2).expect("standard tower")
}

/// The renaming task on `Ch² Δ²` with its generated table.
pub fn renaming_fixture() -> (Tower, Task, SpecializationTable) {
    let tower = renaming_tower();
    let task = Task::renaming(&tower).expect("renaming task");
    let idx = DescendantIndex::build(&tower).expect("descendant index");
    let table = specialize(&task, &tower, &idx).expect("table");
    (tower, task, table)
}
