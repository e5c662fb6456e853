//! Specialization of the iterated protocol to a task.
//!
//! For a process about to enter round `(k,d)` holding `v ∈ V(Ch^{k-1} I)`,
//! the final vertices it can still reach are the descendants `p⁻¹(v)` of `v`
//! at the complex before stage `(k,d)`. When `δ` is constant on them the
//! output is already known and the remaining memory operations can be
//! skipped. The table records that decision for every round-entry key.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{SimError, TaskError};
use crate::label::{Color, Label};
use crate::protocols::{IteratedScan, Phase, ProcessState, SpecializedScan};
use crate::simulator::{
    run_protocol, Action, ExecutionTrace, OpCounts, Outcome, Program, RandomConfig, Replay, Schedule, ScheduleStep,
    Scheduler, SharedMemory,
};
use crate::subdivision::{Position, StageId, Tower};
use crate::tasks::{OutputValue, Task, TaskKind};

/// `p⁻¹(v)` for every tower position and every vertex of that position's complex.
#[derive(Clone, Debug)]
pub struct DescendantIndex {
    sets: Vec<BTreeMap<Label, BTreeSet<Label>>>,
}

impl DescendantIndex {
    pub fn build(tower: &Tower) -> Result<DescendantIndex, TaskError> {
        let stages = tower.stages();
        let mut sets = vec![BTreeMap::<Label, BTreeSet<Label>>::new(); stages.len() + 1];
        for w in tower.final_complex().vertices() {
            let mut cur = w.clone();
            sets[stages.len()].entry(cur.clone()).or_default().insert(w.clone());
            for (i, stage) in stages.iter().enumerate().rev() {
                cur = stage.parent(&cur)?.clone();
                sets[i].entry(cur.clone()).or_default().insert(w.clone());
            }
        }
        Ok(DescendantIndex { sets })
    }

    pub fn positions(&self) -> usize {
        self.sets.len()
    }

    pub fn at_index(&self, index: usize) -> &BTreeMap<Label, BTreeSet<Label>> {
        &self.sets[index]
    }

    pub fn get(&self, tower: &Tower, pos: Position, v: &Label) -> Result<&BTreeSet<Label>, TaskError> {
        let i = tower.position_index(pos)?;
        self.sets[i]
            .get(v)
            .ok_or_else(|| TaskError::Invalid(format!("{v} is not a vertex at {pos}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableEntry {
    Decide(OutputValue),
    Continue,
}

/// Round-entry decisions keyed by `(pid, stage, v)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "RawTable", into = "RawTable")]
pub struct SpecializationTable {
    pub task: TaskKind,
    pub tower_hash: String,
    entries: BTreeMap<(Color, StageId, Label), TableEntry>,
}

#[derive(Serialize, Deserialize)]
struct RawTable {
    task: TaskKind,
    tower_hash: String,
    entries: Vec<(Color, StageId, Label, TableEntry)>,
}

impl From<RawTable> for SpecializationTable {
    fn from(raw: RawTable) -> Self {
        SpecializationTable {
            task: raw.task,
            tower_hash: raw.tower_hash,
            entries: raw.entries.into_iter().map(|(p, s, v, e)| ((p, s, v), e)).collect(),
        }
    }
}

impl From<SpecializationTable> for RawTable {
    fn from(t: SpecializationTable) -> Self {
        RawTable {
            task: t.task,
            tower_hash: t.tower_hash,
            entries: t.entries.into_iter().map(|((p, s, v), e)| (p, s, v, e)).collect(),
        }
    }
}

impl SpecializationTable {
    pub fn lookup(&self, pid: Color, stage: StageId, v: &Label) -> Option<&TableEntry> {
        self.entries.get(&(pid, stage, v.clone()))
    }

    pub fn entries(&self) -> impl Iterator<Item = (Color, StageId, &Label, &TableEntry)> + '_ {
        self.entries.iter().map(|((p, s, v), e)| (*p, *s, v, e))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn decide_count(&self) -> usize {
        self.entries
            .values()
            .filter(|e| matches!(e, TableEntry::Decide(_)))
            .count()
    }

    pub fn insert(&mut self, pid: Color, stage: StageId, v: Label, entry: TableEntry) -> Option<TableEntry> {
        self.entries.insert((pid, stage, v), entry)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("tables serialize")
    }

    pub fn from_json(s: &str) -> Result<SpecializationTable, serde_json::Error> {
        serde_json::from_str(s)
    }
}

/// Builds the table: `Decide(u)` exactly when `δ(p⁻¹(v)) = {u}`.
pub fn specialize(task: &Task, tower: &Tower, idx: &DescendantIndex) -> Result<SpecializationTable, TaskError> {
    if task.tower_hash != tower.hash() {
        return Err(TaskError::Invalid("task was built on a different tower".into()));
    }
    let mut entries = BTreeMap::new();
    for k in 1..=tower.iterations() {
        let start = tower.complex_at(tower.iteration_start(k)?)?;
        for d in (0..=tower.dim()).rev() {
            let stage = StageId::new(k, d);
            let before = tower.before(stage)?;
            for v in start.vertices() {
                let mut image = BTreeSet::new();
                for w in idx.get(tower, before, &v)? {
                    image.insert(task.delta.get(w).map_err(|_| TaskError::Undefined(w.clone()))?.clone());
                }
                let entry = match image.len() {
                    1 => TableEntry::Decide(image.into_iter().next().expect("one element")),
                    _ => TableEntry::Continue,
                };
                entries.insert((v.color(), stage, v), entry);
            }
        }
    }
    Ok(SpecializationTable {
        task: task.task,
        tower_hash: task.tower_hash.clone(),
        entries,
    })
}

/// Input values for the processes of a task: the vertices of its first
/// full-dimensional input facet.
pub fn task_inputs(task: &Task) -> Result<Vec<Label>, TaskError> {
    task.input
        .facets()
        .iter()
        .find(|f| f.len() == task.n + 1)
        .map(|f| f.vertices().to_vec())
        .ok_or_else(|| TaskError::Invalid("input complex has no facet with n+1 colors".into()))
}

fn generic(task: &Task) -> IteratedScan<'_> {
    IteratedScan {
        n: task.n,
        iterations: task.iterations,
        decision: &task.delta,
    }
}

fn specialized<'a>(task: &'a Task, table: &'a SpecializationTable) -> SpecializedScan<'a> {
    SpecializedScan {
        n: task.n,
        iterations: task.iterations,
        decision: &task.delta,
        table,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairedRun {
    pub schedule_id: usize,
    /// Generic protocol on the schedule.
    pub generic: OpCounts,
    /// Specialized protocol on the projection of the schedule.
    pub optimized: OpCounts,
    /// Generic protocol on exactly the steps the specialized run took, with
    /// the processes that decided early then run to completion.
    pub replay: OpCounts,
    pub generic_outputs: Vec<Option<OutputValue>>,
    pub optimized_outputs: Vec<Option<OutputValue>>,
    pub replay_outputs: Vec<Option<OutputValue>>,
    /// Specialized and replayed outputs coincide.
    pub identical_outputs: bool,
    /// Every process returning in both the generic and the specialized run
    /// returned the same value.
    pub agrees_with_generic: bool,
    /// Specialized counts are at most the replay counts, per process.
    pub dominated: bool,
    /// Specialized counts are at most the generic counts, per process.
    pub dominated_on_schedule: bool,
}

fn outputs(t: &ExecutionTrace) -> Vec<Option<OutputValue>> {
    t.outcomes.iter().map(|o| o.output().cloned()).collect()
}

fn dominates(big: &OpCounts, small: &OpCounts) -> bool {
    (0..big.writes.len()).all(|p| small.writes[p] <= big.writes[p] && small.reads[p] <= big.reads[p])
}

/// Paired execution of the generic and the specialized protocol.
///
/// The specialized protocol runs on the projection of `schedule`. The
/// generic protocol then replays exactly the steps it took, so both see the
/// same environment, and finishes the processes that stopped early. Their
/// outputs must coincide; a difference is an [`TaskError::OutputMismatch`].
/// The generic run on the unprojected schedule is reported alongside.
pub fn paired_run(
    task: &Task,
    table: &SpecializationTable,
    schedule: &Schedule,
    schedule_id: usize,
) -> Result<PairedRun, TaskError> {
    let inputs = task_inputs(task)?;
    let scripted = Scheduler::Scripted(schedule.clone());
    let g = run_protocol(&generic(task), &inputs, &scripted, Replay::Project)?;
    let o = run_protocol(&specialized(task, table), &inputs, &scripted, Replay::Project)?;
    let r = run_protocol(
        &generic(task),
        &inputs,
        &Scheduler::Scripted(o.schedule.clone()),
        Replay::Project,
    )?;
    let (go, oo, ro) = (outputs(&g), outputs(&o), outputs(&r));
    for (p, (a, b)) in oo.iter().zip(&ro).enumerate() {
        if a != b {
            let show = |v: &Option<OutputValue>| v.as_ref().map_or("nothing".into(), |v| v.to_string());
            return Err(TaskError::OutputMismatch {
                pid: Color(p),
                generic: show(b),
                optimized: show(a),
            });
        }
    }
    let agrees_with_generic = go.iter().zip(&oo).all(|(a, b)| a.is_none() || b.is_none() || a == b);
    Ok(PairedRun {
        schedule_id,
        dominated: dominates(&r.counters, &o.counters),
        dominated_on_schedule: dominates(&g.counters, &o.counters),
        generic: g.counters,
        optimized: o.counters,
        replay: r.counters,
        identical_outputs: true,
        agrees_with_generic,
        generic_outputs: go,
        optimized_outputs: oo,
        replay_outputs: ro,
    })
}

/// Operation totals compare the specialized runs with their same-environment
/// replays.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SavingsReport {
    pub task: Option<TaskKind>,
    pub tower_hash: String,
    pub runs: Vec<PairedRun>,
    pub generic_ops: usize,
    pub optimized_ops: usize,
}

impl SavingsReport {
    pub fn saved_fraction(&self) -> f64 {
        if self.generic_ops == 0 {
            0.0
        } else {
            1.0 - self.optimized_ops as f64 / self.generic_ops as f64
        }
    }

    pub fn all_dominated(&self) -> bool {
        self.runs.iter().all(|r| r.dominated)
    }

    fn push(&mut self, run: PairedRun) {
        self.generic_ops += run.replay.total();
        self.optimized_ops += run.optimized.total();
        self.runs.push(run);
    }
}

/// Paired runs over the given schedules; stops at the first output mismatch.
pub fn savings_report(
    task: &Task,
    table: &SpecializationTable,
    schedules: &[Schedule],
) -> Result<SavingsReport, TaskError> {
    let mut report = SavingsReport {
        task: Some(task.task),
        tower_hash: task.tower_hash.clone(),
        ..SavingsReport::default()
    };
    for (i, s) in schedules.iter().enumerate() {
        report.push(paired_run(task, table, s, i)?);
    }
    Ok(report)
}

/// Schedules sampled by running the generic protocol under seeded random
/// schedulers, seeds `seed, seed+1, …`.
pub fn random_schedules(
    task: &Task,
    count: usize,
    seed: u64,
    crash_probability: f64,
) -> Result<Vec<Schedule>, TaskError> {
    let inputs = task_inputs(task)?;
    let program = generic(task);
    (0..count as u64)
        .map(|i| {
            let cfg = RandomConfig {
                seed: seed.wrapping_add(i),
                crash_probability,
                random_reads: true,
            };
            Ok(run_protocol(&program, &inputs, &Scheduler::Random(cfg), Replay::Strict)?.schedule)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SoundnessViolation {
    pub pid: Color,
    pub stage: StageId,
    pub vertex: Label,
    pub table_says: OutputValue,
    pub reachable: Vec<OutputValue>,
    /// Generic-protocol schedule reaching the offending state.
    pub witness: Schedule,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SoundnessReport {
    pub states: usize,
    pub decisions_checked: usize,
    pub violation: Option<SoundnessViolation>,
}

impl SoundnessReport {
    pub fn is_sound(&self) -> bool {
        self.violation.is_none()
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct State {
    memory: SharedMemory,
    procs: Vec<ProcessState>,
}

type Reach = Vec<BTreeSet<OutputValue>>;

struct Soundness<'a> {
    program: IteratedScan<'a>,
    table: &'a SpecializationTable,
    branch_reads: bool,
    memo: HashMap<State, Reach>,
    path: Vec<ScheduleStep>,
    report: SoundnessReport,
}

impl Soundness<'_> {
    fn visit(&mut self, st: &State) -> Result<Reach, TaskError> {
        if let Some(r) = self.memo.get(st) {
            return Ok(r.clone());
        }
        self.report.states += 1;
        let mut reach: Reach = vec![BTreeSet::new(); st.procs.len()];
        for (p, ps) in st.procs.iter().enumerate() {
            let choices: Vec<Option<usize>> = match &ps.phase {
                Phase::Decided { output, .. } => {
                    reach[p].insert(output.clone());
                    continue;
                }
                Phase::Collecting { unread, .. } if self.branch_reads => (0..st.memory.cells())
                    .filter(|c| unread & (1 << c) != 0)
                    .map(Some)
                    .collect(),
                _ => vec![None],
            };
            for cell in choices {
                let (next, action) = self.program.step(ps, &st.memory, cell)?;
                let mut child = st.clone();
                if let Action::Write { stage, value } = action {
                    child.memory.write(stage, Color(p), value)?;
                }
                child.procs[p] = next;
                self.path.push(match cell {
                    Some(c) => ScheduleStep::ProcessRead(p, c),
                    None => ScheduleStep::Process(p),
                });
                let sub = self.visit(&child);
                self.path.pop();
                for (acc, s) in reach.iter_mut().zip(sub?) {
                    acc.extend(s);
                }
            }
        }
        for ps in &st.procs {
            if ps.phase != Phase::ToWrite {
                continue;
            }
            let entry = self
                .table
                .lookup(ps.pid, ps.stage(), &ps.v)
                .ok_or_else(|| SimError::TableMiss {
                    pid: ps.pid,
                    stage: ps.stage(),
                    vertex: ps.v.clone(),
                })?;
            if let TableEntry::Decide(u) = entry {
                self.report.decisions_checked += 1;
                let got = &reach[ps.pid.0];
                if (got.len() != 1 || !got.contains(u)) && self.report.violation.is_none() {
                    self.report.violation = Some(SoundnessViolation {
                        pid: ps.pid,
                        stage: ps.stage(),
                        vertex: ps.v.clone(),
                        table_says: u.clone(),
                        reachable: got.iter().cloned().collect(),
                        witness: Schedule {
                            steps: self.path.clone(),
                            crashes: Vec::new(),
                        },
                    });
                }
            }
        }
        self.memo.insert(st.clone(), reach.clone());
        Ok(reach)
    }
}

/// Explores every state of the generic protocol and checks that wherever a
/// process is about to enter a round for which the table says `Decide(u)`,
/// `u` is the only output that process can still reach.
pub fn check_soundness_exhaustive(
    task: &Task,
    table: &SpecializationTable,
    branch_reads: bool,
) -> Result<SoundnessReport, TaskError> {
    let inputs = task_inputs(task)?;
    let program = generic(task);
    let procs = inputs
        .iter()
        .enumerate()
        .map(|(p, v)| program.start(Color(p), v.clone()))
        .collect::<Result<Vec<_>, _>>()?;
    let root = State {
        memory: SharedMemory::new(task.n),
        procs,
    };
    let mut s = Soundness {
        program,
        table,
        branch_reads,
        memo: HashMap::new(),
        path: Vec::new(),
        report: SoundnessReport::default(),
    };
    s.visit(&root)?;
    Ok(s.report)
}

/// Returns `true` when a run ended with every process returned.
pub fn all_returned(outcomes: &[Outcome]) -> bool {
    outcomes.iter().all(|o| matches!(o, Outcome::Returned { .. }))
}
