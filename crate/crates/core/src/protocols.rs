//! Step machines for the immediate-snapshot protocol family.
//!
//! The recursive procedures are flattened into `(k, d, phase)` so that every
//! register access is a separate schedulable step:
//!
//! - [`WriteScan`]: multi-round write&scan immediate snapshot.
//! - [`ObliviousScan`]: the same protocol with a write&oblivious scan, which
//!   returns the process's own value when the view is too small.
//! - [`IteratedScan`]: `K` iterations of the oblivious protocol followed by a
//!   decision map.
//! - [`SpecializedScan`]: the iterated protocol that consults a
//!   specialization table before every round and stops as soon as the
//!   output is determined.
//!
//! A write&oblivious scan result `(i, view)` is the label `Pair(i, view)`,
//! the same label the Schlegel step gives the new vertex inside `view`.

use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::label::{Color, Label};
use crate::optimizer::{SpecializationTable, TableEntry};
use crate::simulator::{Action, Program, SharedMemory};
use crate::subdivision::StageId;
use crate::tasks::{DecisionMap, OutputValue};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    ToWrite,
    /// `unread` is a bitmask of registers still to read; `view` holds the
    /// non-⊥ values read so far, sorted.
    Collecting {
        unread: u32,
        view: Vec<Label>,
    },
    Decided {
        output: OutputValue,
        vertex: Label,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProcessState {
    pub pid: Color,
    /// Current private value `v_i`.
    pub v: Label,
    pub k: usize,
    pub d: usize,
    pub phase: Phase,
}

impl ProcessState {
    fn entering(pid: Color, v: Label, k: usize, d: usize) -> ProcessState {
        ProcessState {
            pid,
            v,
            k,
            d,
            phase: Phase::ToWrite,
        }
    }

    pub fn stage(&self) -> StageId {
        StageId::new(self.k, self.d)
    }

    pub fn is_decided(&self) -> bool {
        matches!(self.phase, Phase::Decided { .. })
    }

    fn decided(&self, output: OutputValue, vertex: Label) -> ProcessState {
        ProcessState {
            phase: Phase::Decided { output, vertex },
            ..self.clone()
        }
    }
}

/// One atomic action of a write followed by a collect on `mem_{k,d}`.
/// Returns the next state and, once the last register has been read, the
/// collected view.
fn scan_step(
    st: &ProcessState,
    mem: &SharedMemory,
    cell: Option<usize>,
) -> Result<(ProcessState, Action, Option<Vec<Label>>), SimError> {
    let stage = st.stage();
    match &st.phase {
        Phase::ToWrite => {
            let next = ProcessState {
                phase: Phase::Collecting {
                    unread: (1u32 << mem.cells()) - 1,
                    view: Vec::new(),
                },
                ..st.clone()
            };
            let action = Action::Write {
                stage,
                value: st.v.clone(),
            };
            Ok((next, action, None))
        }
        Phase::Collecting { unread, view } => {
            let cell = match cell {
                Some(c) if c < mem.cells() && unread & (1 << c) != 0 => c,
                Some(c) => {
                    return Err(SimError::InvalidSchedule(format!(
                        "process {} cannot read register {c} of mem{stage} now",
                        st.pid
                    )))
                }
                None => unread.trailing_zeros() as usize,
            };
            let observed = mem.read(stage, cell).cloned();
            let mut view = view.clone();
            if let Some(l) = &observed {
                let at = view.binary_search(l).unwrap_or_else(|e| e);
                view.insert(at, l.clone());
            }
            let unread = unread & !(1 << cell);
            let action = Action::Read { stage, cell, observed };
            if unread == 0 {
                let next = ProcessState {
                    phase: Phase::Collecting {
                        unread: 0,
                        view: Vec::new(),
                    },
                    ..st.clone()
                };
                Ok((next, action, Some(view)))
            } else {
                let next = ProcessState {
                    phase: Phase::Collecting { unread, view },
                    ..st.clone()
                };
                Ok((next, action, None))
            }
        }
        Phase::Decided { .. } => Err(SimError::InvalidSchedule(format!(
            "process {} has already returned",
            st.pid
        ))),
    }
}

fn view_label(pid: Color, view: &[Label]) -> Result<Label, SimError> {
    Ok(Label::pair(pid, view.iter().cloned())?)
}

fn next_round(st: &ProcessState) -> Result<ProcessState, SimError> {
    if st.d == 0 {
        return Err(SimError::Protocol(format!(
            "process {} saw too few values in round {}",
            st.pid,
            st.stage()
        )));
    }
    Ok(ProcessState::entering(st.pid, st.v.clone(), st.k, st.d - 1))
}

/// `WOScan`: `(i, view)` if the view has `d+1` values, else `v_i`.
fn oblivious_result(st: &ProcessState, view: &[Label]) -> Result<Label, SimError> {
    if view.len() == st.d + 1 {
        view_label(st.pid, view)
    } else {
        Ok(st.v.clone())
    }
}

/// Write&scan immediate snapshot: `WScan(d)` then `IS(d)`.
pub fn step_is(st: &ProcessState, mem: &SharedMemory, cell: Option<usize>) -> Result<(ProcessState, Action), SimError> {
    let (next, action, view) = scan_step(st, mem, cell)?;
    let Some(view) = view else {
        return Ok((next, action));
    };
    // WScan always returns (i, view); IS decides on its size.
    let (pid, seen) = (st.pid, view);
    if seen.len() == st.d + 1 {
        let snapshot = view_label(pid, &seen)?;
        Ok((st.decided(OutputValue::Vertex(snapshot.clone()), snapshot), action))
    } else {
        Ok((next_round(st)?, action))
    }
}

/// Write&oblivious-scan immediate snapshot: `WOScan(d)` then `IS'(d)`.
pub fn step_is_prime(
    st: &ProcessState,
    mem: &SharedMemory,
    cell: Option<usize>,
) -> Result<(ProcessState, Action), SimError> {
    let (next, action, view) = scan_step(st, mem, cell)?;
    let Some(view) = view else {
        return Ok((next, action));
    };
    let u = oblivious_result(st, &view)?;
    if u != st.v {
        Ok((st.decided(OutputValue::Vertex(u.clone()), u), action))
    } else {
        Ok((next_round(st)?, action))
    }
}

/// One round transition of the iterated protocol, shared by the generic and
/// specialized variants. Returns the state entering the next round.
fn iterated_round_end(
    st: &ProcessState,
    view: &[Label],
    n: usize,
    iterations: usize,
    decision: &DecisionMap,
) -> Result<ProcessState, SimError> {
    let u = oblivious_result(st, view)?;
    if u == st.v {
        return next_round(st);
    }
    if st.k == iterations {
        let out = decision.get(&u)?.clone();
        Ok(st.decided(out, u))
    } else {
        Ok(ProcessState::entering(st.pid, u, st.k + 1, n))
    }
}

/// Generic iterated protocol step.
pub fn step_iis(
    st: &ProcessState,
    mem: &SharedMemory,
    cell: Option<usize>,
    iterations: usize,
    decision: &DecisionMap,
) -> Result<(ProcessState, Action), SimError> {
    let n = mem.cells() - 1;
    let (next, action, view) = scan_step(st, mem, cell)?;
    match view {
        None => Ok((next, action)),
        Some(view) => Ok((iterated_round_end(st, &view, n, iterations, decision)?, action)),
    }
}

/// Applies the table check a specialized process performs on entering a
/// round: on `Decide(u)` it returns `u` without touching memory.
pub fn consult_table(st: ProcessState, table: &SpecializationTable) -> Result<ProcessState, SimError> {
    if st.phase != Phase::ToWrite {
        return Ok(st);
    }
    match table.lookup(st.pid, st.stage(), &st.v) {
        Some(TableEntry::Decide(u)) => {
            let out = u.clone();
            let v = st.v.clone();
            Ok(st.decided(out, v))
        }
        Some(TableEntry::Continue) => Ok(st),
        None => Err(SimError::TableMiss {
            pid: st.pid,
            stage: st.stage(),
            vertex: st.v.clone(),
        }),
    }
}

/// Specialized iterated protocol step.
pub fn step_iis_opt(
    st: &ProcessState,
    mem: &SharedMemory,
    cell: Option<usize>,
    iterations: usize,
    decision: &DecisionMap,
    table: &SpecializationTable,
) -> Result<(ProcessState, Action), SimError> {
    let (next, action) = step_iis(st, mem, cell, iterations, decision)?;
    Ok((consult_table(next, table)?, action))
}

/// Multi-round write&scan immediate snapshot.
#[derive(Clone, Debug)]
pub struct WriteScan {
    pub n: usize,
}

/// Multi-round write&oblivious-scan immediate snapshot.
#[derive(Clone, Debug)]
pub struct ObliviousScan {
    pub n: usize,
}

/// Generic protocol: `K` iterated immediate snapshots, then `δ`.
#[derive(Clone, Debug)]
pub struct IteratedScan<'a> {
    pub n: usize,
    pub iterations: usize,
    pub decision: &'a DecisionMap,
}

/// Generic protocol specialized by a precomputed table.
#[derive(Clone, Debug)]
pub struct SpecializedScan<'a> {
    pub n: usize,
    pub iterations: usize,
    pub decision: &'a DecisionMap,
    pub table: &'a SpecializationTable,
}

fn check_pid(pid: Color, n: usize) -> Result<(), SimError> {
    if pid.0 > n {
        return Err(SimError::InvalidSchedule(format!("no process {pid} when n = {n}")));
    }
    Ok(())
}

fn round_actions(n: usize, iterations: usize) -> usize {
    iterations * (n + 1) * (n + 2)
}

impl Program for WriteScan {
    fn n(&self) -> usize {
        self.n
    }

    fn max_actions(&self) -> usize {
        round_actions(self.n, 1)
    }

    fn start(&self, pid: Color, input: Label) -> Result<ProcessState, SimError> {
        check_pid(pid, self.n)?;
        Ok(ProcessState::entering(pid, input, 1, self.n))
    }

    fn step(
        &self,
        st: &ProcessState,
        mem: &SharedMemory,
        cell: Option<usize>,
    ) -> Result<(ProcessState, Action), SimError> {
        step_is(st, mem, cell)
    }
}

impl Program for ObliviousScan {
    fn n(&self) -> usize {
        self.n
    }

    fn max_actions(&self) -> usize {
        round_actions(self.n, 1)
    }

    fn start(&self, pid: Color, input: Label) -> Result<ProcessState, SimError> {
        check_pid(pid, self.n)?;
        Ok(ProcessState::entering(pid, input, 1, self.n))
    }

    fn step(
        &self,
        st: &ProcessState,
        mem: &SharedMemory,
        cell: Option<usize>,
    ) -> Result<(ProcessState, Action), SimError> {
        step_is_prime(st, mem, cell)
    }
}

impl Program for IteratedScan<'_> {
    fn n(&self) -> usize {
        self.n
    }

    fn max_actions(&self) -> usize {
        round_actions(self.n, self.iterations)
    }

    fn start(&self, pid: Color, input: Label) -> Result<ProcessState, SimError> {
        check_pid(pid, self.n)?;
        Ok(ProcessState::entering(pid, input, 1, self.n))
    }

    fn step(
        &self,
        st: &ProcessState,
        mem: &SharedMemory,
        cell: Option<usize>,
    ) -> Result<(ProcessState, Action), SimError> {
        step_iis(st, mem, cell, self.iterations, self.decision)
    }
}

impl Program for SpecializedScan<'_> {
    fn n(&self) -> usize {
        self.n
    }

    fn max_actions(&self) -> usize {
        round_actions(self.n, self.iterations)
    }

    fn start(&self, pid: Color, input: Label) -> Result<ProcessState, SimError> {
        check_pid(pid, self.n)?;
        consult_table(ProcessState::entering(pid, input, 1, self.n), self.table)
    }

    fn step(
        &self,
        st: &ProcessState,
        mem: &SharedMemory,
        cell: Option<usize>,
    ) -> Result<(ProcessState, Action), SimError> {
        step_iis_opt(st, mem, cell, self.iterations, self.decision, self.table)
    }
}

/// Base-labelled inputs `0, 1, …, n`.
pub fn standard_inputs(n: usize) -> Vec<Label> {
    (0..=n).map(Label::base).collect()
}
