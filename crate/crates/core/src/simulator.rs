//! Deterministic simulation of single-writer multi-reader atomic registers.
//!
//! One schedule step is one atomic register operation of one process. A
//! process that is no longer scheduled has crashed; explicit crash points are
//! shorthand for that. Runs are driven by a scripted schedule or a seeded
//! random scheduler, and [`enumerate_executions`] explores every interleaving
//! with memoization on the global state.

use std::collections::{BTreeMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::label::{Color, Label};
use crate::protocols::{Phase, ProcessState};
use crate::subdivision::StageId;
use crate::tasks::{OutputSimplex, OutputValue, OutputVertex};

/// The arrays `mem_{k,d}`, each holding `n+1` registers.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SharedMemory {
    cells: usize,
    arrays: BTreeMap<StageId, Vec<Option<Label>>>,
}

impl SharedMemory {
    pub fn new(n: usize) -> SharedMemory {
        SharedMemory {
            cells: n + 1,
            arrays: BTreeMap::new(),
        }
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn read(&self, stage: StageId, cell: usize) -> Option<&Label> {
        self.arrays.get(&stage).and_then(|a| a[cell].as_ref())
    }

    /// Writes `value` into register `writer` of `mem_stage`.
    ///
    /// Registers are single-writer and written at most once per run.
    pub fn write(&mut self, stage: StageId, writer: Color, value: Label) -> Result<(), SimError> {
        let cells = self.cells;
        if writer.0 >= cells {
            return Err(SimError::InvalidSchedule(format!("no register for process {writer}")));
        }
        let slot = &mut self.arrays.entry(stage).or_insert_with(|| vec![None; cells])[writer.0];
        if slot.is_some() {
            return Err(SimError::Protocol(format!("process {writer} wrote mem{stage} twice")));
        }
        *slot = Some(value);
        Ok(())
    }

    pub fn array(&self, stage: StageId) -> Option<&[Option<Label>]> {
        self.arrays.get(&stage).map(Vec::as_slice)
    }
}

/// One atomic operation as recorded in a trace.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Write {
        stage: StageId,
        value: Label,
    },
    Read {
        stage: StageId,
        cell: usize,
        observed: Option<Label>,
    },
}

/// A per-process step machine the simulator can drive.
pub trait Program {
    /// `n`, for a system of processes `0..=n`.
    fn n(&self) -> usize;

    /// Upper bound on the atomic actions of one process.
    fn max_actions(&self) -> usize;

    fn start(&self, pid: Color, input: Label) -> Result<ProcessState, SimError>;

    /// Performs exactly one atomic action of a running process. `cell`
    /// selects the next register to read during a collect; `None` reads the
    /// lowest unread one.
    fn step(
        &self,
        state: &ProcessState,
        memory: &SharedMemory,
        cell: Option<usize>,
    ) -> Result<(ProcessState, Action), SimError>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScheduleStep {
    Process(usize),
    ProcessRead(usize, usize),
}

impl ScheduleStep {
    pub fn process(self) -> usize {
        match self {
            ScheduleStep::Process(p) | ScheduleStep::ProcessRead(p, _) => p,
        }
    }

    pub fn cell(self) -> Option<usize> {
        match self {
            ScheduleStep::Process(_) => None,
            ScheduleStep::ProcessRead(_, c) => Some(c),
        }
    }
}

/// A scripted schedule: `{"steps":[…], "crashes":[[proc, own_step], …]}`.
///
/// A crash `[p, i]` stops process `p` before its `i`-th own action.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub steps: Vec<ScheduleStep>,
    #[serde(default)]
    pub crashes: Vec<(usize, usize)>,
}

impl Schedule {
    pub fn from_processes<I: IntoIterator<Item = usize>>(steps: I) -> Schedule {
        Schedule {
            steps: steps.into_iter().map(ScheduleStep::Process).collect(),
            crashes: Vec::new(),
        }
    }

    pub fn with_crash(mut self, process: usize, own_step: usize) -> Schedule {
        self.crashes.push((process, own_step));
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("schedules serialize")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomConfig {
    pub seed: u64,
    /// Chance that a given process gets a crash point.
    pub crash_probability: f64,
    /// Collect registers in a random order instead of ascending.
    pub random_reads: bool,
}

impl RandomConfig {
    pub fn new(seed: u64) -> RandomConfig {
        RandomConfig {
            seed,
            crash_probability: 0.0,
            random_reads: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Scheduler {
    Scripted(Schedule),
    Random(RandomConfig),
}

/// How a scripted run treats steps for processes that can no longer move.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Replay {
    /// Such a step is an [`SimError::InvalidSchedule`].
    #[default]
    Strict,
    /// Such a step is dropped; used to replay a schedule against a protocol
    /// that stops earlier. When the script ends, processes without a crash
    /// point keep taking steps in round-robin order until they return.
    Project,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Returned { output: OutputValue, vertex: Label },
    Crashed { at_step: usize },
    Running,
}

impl Outcome {
    pub fn output(&self) -> Option<&OutputValue> {
        match self {
            Outcome::Returned { output, .. } => Some(output),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounts {
    pub writes: Vec<usize>,
    pub reads: Vec<usize>,
    pub total_writes: usize,
    pub total_reads: usize,
}

impl OpCounts {
    pub fn process(&self, p: usize) -> (usize, usize) {
        (self.writes[p], self.reads[p])
    }

    pub fn total(&self) -> usize {
        self.total_writes + self.total_reads
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub process: usize,
    pub action: Action,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecutionTrace {
    pub n: usize,
    pub inputs: Vec<Label>,
    pub steps: Vec<TraceStep>,
    pub outcomes: Vec<Outcome>,
    pub counters: OpCounts,
    /// The schedule actually executed, replayable in strict mode.
    pub schedule: Schedule,
    /// The scripted schedule ran out while some process could still move.
    #[serde(default)]
    pub schedule_exhausted: bool,
}

impl ExecutionTrace {
    /// Outputs of the processes that returned.
    pub fn output_simplex(&self) -> OutputSimplex {
        OutputSimplex::new(self.outcomes.iter().enumerate().filter_map(|(p, o)| {
            o.output().map(|v| OutputVertex {
                color: Color(p),
                value: v.clone(),
            })
        }))
    }

    /// Final vertices (before any decision map) of the processes that returned.
    pub fn final_vertices(&self) -> Vec<Option<Label>> {
        self.outcomes
            .iter()
            .map(|o| match o {
                Outcome::Returned { vertex, .. } => Some(vertex.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("traces serialize")
    }
}

/// Exact operation counts of a trace, recomputed from its steps.
pub fn count_ops(trace: &ExecutionTrace) -> OpCounts {
    let procs = trace.outcomes.len().max(trace.n + 1);
    let mut c = OpCounts {
        writes: vec![0; procs],
        reads: vec![0; procs],
        total_writes: 0,
        total_reads: 0,
    };
    for s in &trace.steps {
        match s.action {
            Action::Write { .. } => {
                c.writes[s.process] += 1;
                c.total_writes += 1;
            }
            Action::Read { .. } => {
                c.reads[s.process] += 1;
                c.total_reads += 1;
            }
        }
    }
    c
}

struct Run<'p, P: ?Sized> {
    program: &'p P,
    memory: SharedMemory,
    states: Vec<ProcessState>,
    own_steps: Vec<usize>,
    crash_at: Vec<Option<usize>>,
    steps: Vec<TraceStep>,
    executed: Vec<ScheduleStep>,
}

impl<'p, P: Program + ?Sized> Run<'p, P> {
    fn new(program: &'p P, inputs: &[Label], crashes: &[(usize, usize)]) -> Result<Self, SimError> {
        let n = program.n();
        if inputs.len() != n + 1 {
            return Err(SimError::InvalidSchedule(format!(
                "{} inputs for {} processes",
                inputs.len(),
                n + 1
            )));
        }
        let mut crash_at = vec![None; n + 1];
        for &(p, at) in crashes {
            let slot = crash_at
                .get_mut(p)
                .ok_or_else(|| SimError::InvalidSchedule(format!("crash point for unknown process {p}")))?;
            *slot = Some(slot.map_or(at, |prev: usize| prev.min(at)));
        }
        let states = inputs
            .iter()
            .enumerate()
            .map(|(p, v)| program.start(Color(p), v.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Run {
            program,
            memory: SharedMemory::new(n),
            states,
            own_steps: vec![0; n + 1],
            crash_at,
            steps: Vec::new(),
            executed: Vec::new(),
        })
    }

    fn crashed(&self, p: usize) -> bool {
        self.crash_at[p].is_some_and(|c| self.own_steps[p] >= c)
    }

    fn movable(&self, p: usize) -> bool {
        !self.crashed(p) && !matches!(self.states[p].phase, Phase::Decided { .. })
    }

    fn step(&mut self, p: usize, cell: Option<usize>) -> Result<(), SimError> {
        let (next, action) = self.program.step(&self.states[p], &self.memory, cell)?;
        if let Action::Write { stage, value } = &action {
            self.memory.write(*stage, Color(p), value.clone())?;
        }
        self.states[p] = next;
        self.own_steps[p] += 1;
        self.steps.push(TraceStep { process: p, action });
        self.executed.push(match cell {
            Some(c) => ScheduleStep::ProcessRead(p, c),
            None => ScheduleStep::Process(p),
        });
        Ok(())
    }

    fn finish(self, inputs: &[Label], exhausted_check: bool) -> ExecutionTrace {
        let mut exhausted = false;
        let outcomes: Vec<Outcome> = self
            .states
            .iter()
            .enumerate()
            .map(|(p, st)| match &st.phase {
                Phase::Decided { output, vertex } => Outcome::Returned {
                    output: output.clone(),
                    vertex: vertex.clone(),
                },
                _ => {
                    if !self.crashed(p) && exhausted_check {
                        exhausted = true;
                    }
                    Outcome::Crashed {
                        at_step: self.own_steps[p],
                    }
                }
            })
            .collect();
        let crashes = outcomes
            .iter()
            .enumerate()
            .filter_map(|(p, o)| match o {
                Outcome::Crashed { at_step } => Some((p, *at_step)),
                _ => None,
            })
            .collect();
        let mut trace = ExecutionTrace {
            n: self.program.n(),
            inputs: inputs.to_vec(),
            steps: self.steps,
            outcomes,
            counters: OpCounts::default(),
            schedule: Schedule {
                steps: self.executed,
                crashes,
            },
            schedule_exhausted: exhausted,
        };
        trace.counters = count_ops(&trace);
        trace
    }
}

/// Runs `program` on `inputs` under `scheduler`.
///
/// Processes that have not returned when the schedule ends are reported as
/// crashed; for scripted schedules this sets `schedule_exhausted`.
pub fn run_protocol<P: Program + ?Sized>(
    program: &P,
    inputs: &[Label],
    scheduler: &Scheduler,
    replay: Replay,
) -> Result<ExecutionTrace, SimError> {
    match scheduler {
        Scheduler::Scripted(schedule) => {
            let mut run = Run::new(program, inputs, &schedule.crashes)?;
            for (i, s) in schedule.steps.iter().enumerate() {
                let p = s.process();
                if p >= run.states.len() {
                    return Err(SimError::InvalidSchedule(format!("step {i}: no process {p}")));
                }
                if !run.movable(p) {
                    match replay {
                        Replay::Strict => {
                            return Err(SimError::InvalidSchedule(format!(
                                "step {i}: process {p} has crashed or terminated"
                            )))
                        }
                        Replay::Project => continue,
                    }
                }
                run.step(p, s.cell())?;
            }
            if replay == Replay::Project {
                let budget = program.max_actions() * run.states.len();
                let mut taken = 0;
                loop {
                    let live: Vec<usize> = (0..run.states.len())
                        .filter(|&p| run.movable(p) && run.crash_at[p].is_none())
                        .collect();
                    if live.is_empty() {
                        break;
                    }
                    for p in live {
                        run.step(p, None)?;
                        taken += 1;
                    }
                    if taken > budget {
                        return Err(SimError::Protocol("completion exceeded the step bound".into()));
                    }
                }
            }
            Ok(run.finish(inputs, true))
        }
        Scheduler::Random(cfg) => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let bound = program.max_actions();
            let mut crashes = Vec::new();
            for p in 0..=program.n() {
                if cfg.crash_probability > 0.0 && rng.gen_bool(cfg.crash_probability) {
                    crashes.push((p, rng.gen_range(0..=bound)));
                }
            }
            let mut run = Run::new(program, inputs, &crashes)?;
            loop {
                let movable: Vec<usize> = (0..run.states.len()).filter(|&p| run.movable(p)).collect();
                let Some(&p) = movable.choose(&mut rng) else {
                    break;
                };
                let cell = match &run.states[p].phase {
                    Phase::Collecting { unread, .. } if cfg.random_reads => {
                        let open: Vec<usize> = (0..run.memory.cells()).filter(|c| unread & (1 << c) != 0).collect();
                        open.choose(&mut rng).copied()
                    }
                    _ => None,
                };
                run.step(p, cell)?;
                if run.steps.len() > bound * run.states.len() {
                    return Err(SimError::Protocol("random run exceeded the step bound".into()));
                }
            }
            Ok(run.finish(inputs, false))
        }
    }
}

/// Options for exhaustive exploration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExploreOptions {
    /// Also report outputs of every reachable state with the undecided
    /// processes taken as crashed.
    pub crashes: bool,
    /// Branch on the order in which a collect reads registers.
    pub branch_reads: bool,
    pub max_depth: usize,
}

impl Default for ExploreOptions {
    fn default() -> Self {
        ExploreOptions {
            crashes: false,
            branch_reads: false,
            max_depth: 10_000,
        }
    }
}

/// Distinct output simplexes over all interleavings, each with a witness.
#[derive(Clone, Debug, Default)]
pub struct Enumeration {
    pub outputs: BTreeMap<OutputSimplex, Schedule>,
    pub states: usize,
    pub terminal_states: usize,
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct GlobalState {
    memory: SharedMemory,
    procs: Vec<ProcessState>,
}

struct Explorer<'p, P: ?Sized> {
    program: &'p P,
    opts: &'p ExploreOptions,
    seen: HashSet<GlobalState>,
    result: Enumeration,
    path: Vec<ScheduleStep>,
    own: Vec<usize>,
}

impl<P: Program + ?Sized> Explorer<'_, P> {
    fn record(&mut self, st: &GlobalState) {
        let decided: Vec<OutputVertex> = st
            .procs
            .iter()
            .filter_map(|p| match &p.phase {
                Phase::Decided { output, .. } => Some(OutputVertex {
                    color: p.pid,
                    value: output.clone(),
                }),
                _ => None,
            })
            .collect();
        let terminal = decided.len() == st.procs.len();
        if terminal {
            self.result.terminal_states += 1;
        }
        if !(terminal || self.opts.crashes) {
            return;
        }
        let key = OutputSimplex::new(decided);
        if self.result.outputs.contains_key(&key) {
            return;
        }
        let crashes = st
            .procs
            .iter()
            .filter(|p| !matches!(p.phase, Phase::Decided { .. }))
            .map(|p| (p.pid.0, self.own[p.pid.0]))
            .collect();
        self.result.outputs.insert(
            key,
            Schedule {
                steps: self.path.clone(),
                crashes,
            },
        );
    }

    fn visit(&mut self, st: GlobalState) -> Result<(), SimError> {
        if self.path.len() > self.opts.max_depth {
            return Err(SimError::DepthExceeded(self.opts.max_depth));
        }
        if !self.seen.insert(st.clone()) {
            return Ok(());
        }
        self.result.states += 1;
        self.record(&st);
        for p in 0..st.procs.len() {
            let choices: Vec<Option<usize>> = match &st.procs[p].phase {
                Phase::Decided { .. } => continue,
                Phase::Collecting { unread, .. } if self.opts.branch_reads => (0..st.memory.cells())
                    .filter(|c| unread & (1 << c) != 0)
                    .map(Some)
                    .collect(),
                _ => vec![None],
            };
            for cell in choices {
                let (next, action) = self.program.step(&st.procs[p], &st.memory, cell)?;
                let mut child = st.clone();
                if let Action::Write { stage, value } = action {
                    child.memory.write(stage, Color(p), value)?;
                }
                child.procs[p] = next;
                self.path.push(match cell {
                    Some(c) => ScheduleStep::ProcessRead(p, c),
                    None => ScheduleStep::Process(p),
                });
                self.own[p] += 1;
                let res = self.visit(child);
                self.own[p] -= 1;
                self.path.pop();
                res?;
            }
        }
        Ok(())
    }
}

/// Explores every reachable global state of `program` by memoized DFS.
pub fn enumerate_executions<P: Program + ?Sized>(
    program: &P,
    inputs: &[Label],
    opts: &ExploreOptions,
) -> Result<Enumeration, SimError> {
    let run = Run::new(program, inputs, &[])?;
    let root = GlobalState {
        memory: run.memory,
        procs: run.states,
    };
    let mut ex = Explorer {
        program,
        opts,
        seen: HashSet::new(),
        result: Enumeration::default(),
        path: Vec::new(),
        own: vec![0; program.n() + 1],
    };
    ex.visit(root)?;
    Ok(ex.result)
}

/// Calls `visit` on every execution, i.e. on the trace of every schedule
/// prefix with the processes that have not returned taken as crashed.
///
/// No memoization: the number of prefixes grows combinatorially, so this is
/// meant for `n = 1`.
pub fn for_each_execution<P, F>(
    program: &P,
    inputs: &[Label],
    branch_reads: bool,
    mut visit: F,
) -> Result<usize, SimError>
where
    P: Program + ?Sized,
    F: FnMut(&ExecutionTrace) -> Result<(), SimError>,
{
    fn go<P: Program + ?Sized, F: FnMut(&ExecutionTrace) -> Result<(), SimError>>(
        program: &P,
        inputs: &[Label],
        schedule: &mut Vec<ScheduleStep>,
        branch_reads: bool,
        visit: &mut F,
        count: &mut usize,
    ) -> Result<(), SimError> {
        let trace = run_protocol(
            program,
            inputs,
            &Scheduler::Scripted(Schedule {
                steps: schedule.clone(),
                crashes: Vec::new(),
            }),
            Replay::Strict,
        )?;
        *count += 1;
        visit(&trace)?;
        // re-derive live states by replaying; cheap at the sizes this is for
        let mut run = Run::new(program, inputs, &[])?;
        for s in schedule.iter() {
            run.step(s.process(), s.cell())?;
        }
        for p in 0..run.states.len() {
            let choices: Vec<Option<usize>> = match &run.states[p].phase {
                Phase::Decided { .. } => continue,
                Phase::Collecting { unread, .. } if branch_reads => (0..run.memory.cells())
                    .filter(|c| unread & (1 << c) != 0)
                    .map(Some)
                    .collect(),
                _ => vec![None],
            };
            for cell in choices {
                schedule.push(match cell {
                    Some(c) => ScheduleStep::ProcessRead(p, c),
                    None => ScheduleStep::Process(p),
                });
                let r = go(program, inputs, schedule, branch_reads, visit, count);
                schedule.pop();
                r?;
            }
        }
        Ok(())
    }
    let mut count = 0;
    go(program, inputs, &mut Vec::new(), branch_reads, &mut visit, &mut count)?;
    Ok(count)
}

/// Ordered blocks of processes, `"1,2;0"` in text form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedPartition(pub Vec<Vec<usize>>);

impl OrderedPartition {
    pub fn parse(s: &str) -> Result<OrderedPartition, SimError> {
        let blocks = s
            .split(';')
            .map(|b| {
                b.split(',')
                    .map(|x| {
                        x.trim()
                            .parse::<usize>()
                            .map_err(|e| SimError::InvalidPartition(format!("{s:?}: {e}")))
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(OrderedPartition(blocks))
    }

    fn validate(&self, n: usize) -> Result<(), SimError> {
        let mut seen = vec![false; n + 1];
        for b in &self.0 {
            if b.is_empty() {
                return Err(SimError::InvalidPartition("empty block".into()));
            }
            for &p in b {
                if p > n || std::mem::replace(&mut seen[p], true) {
                    return Err(SimError::InvalidPartition(format!(
                        "process {p} repeated or out of range"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Schedule in which, per iteration, the blocks run one after another and
/// the processes of a block perform each round in lock step: all of them
/// write, then all of them collect. One partition per iteration.
///
/// Processes absent from an iteration's partition take no steps in it, so
/// they must be absent from later iterations too.
pub fn targeted_schedule(n: usize, iterations: &[OrderedPartition]) -> Result<Schedule, SimError> {
    let mut steps = Vec::new();
    let mut participants: Option<Vec<usize>> = None;
    for part in iterations {
        part.validate(n)?;
        let mut members: Vec<usize> = part.0.iter().flatten().copied().collect();
        members.sort_unstable();
        if let Some(prev) = &participants {
            if members.iter().any(|p| !prev.contains(p)) {
                return Err(SimError::InvalidPartition(
                    "a process joins after skipping an iteration".into(),
                ));
            }
        }
        let mut prefix = 0;
        for block in &part.0 {
            prefix += block.len();
            // the block returns at the round whose dimension is prefix - 1
            for _d in (prefix - 1..=n).rev() {
                steps.extend(block.iter().map(|&p| ScheduleStep::Process(p)));
                for &p in block {
                    steps.extend(std::iter::repeat_n(ScheduleStep::Process(p), n + 1));
                }
            }
        }
        participants = Some(members);
    }
    Ok(Schedule {
        steps,
        crashes: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registers_are_single_writer_once() {
        let mut m = SharedMemory::new(1);
        let s = StageId::new(1, 1);
        assert_eq!(m.read(s, 0), None);
        m.write(s, Color(0), Label::base(0)).unwrap();
        assert_eq!(m.read(s, 0), Some(&Label::base(0)));
        assert!(m.write(s, Color(0), Label::base(0)).is_err());
        assert!(m.write(s, Color(2), Label::base(2)).is_err());
    }

    #[test]
    fn schedule_json_shape() {
        let s = Schedule {
            steps: vec![ScheduleStep::Process(0), ScheduleStep::ProcessRead(1, 0)],
            crashes: vec![(2, 3)],
        };
        assert_eq!(s.to_json(), r#"{"steps":[0,[1,0]],"crashes":[[2,3]]}"#);
        let back: Schedule = serde_json::from_str(&s.to_json()).unwrap();
        assert_eq!(back, s);
        let bare: Schedule = serde_json::from_str(r#"{"steps":[1,1]}"#).unwrap();
        assert!(bare.crashes.is_empty());
    }

    #[test]
    fn partitions_parse_and_validate() {
        let p = OrderedPartition::parse("1,2;0").unwrap();
        assert_eq!(p.0, vec![vec![1, 2], vec![0]]);
        assert!(OrderedPartition::parse("1;x").is_err());
        assert!(targeted_schedule(2, &[OrderedPartition(vec![vec![0], vec![0]])]).is_err());
        assert!(targeted_schedule(1, &[OrderedPartition(vec![vec![2]])]).is_err());
        assert!(targeted_schedule(2, &[OrderedPartition(vec![vec![0]]), OrderedPartition(vec![vec![1]])]).is_err());
    }

    #[test]
    fn lock_step_schedule_length() {
        // one block of three at n = 2 returns in the first round: 3 writes + 9 reads
        let s = targeted_schedule(2, &[OrderedPartition(vec![vec![0, 1, 2]])]).unwrap();
        assert_eq!(s.steps.len(), 12);
        // a solo process runs all three rounds
        let solo = targeted_schedule(2, &[OrderedPartition(vec![vec![0]])]).unwrap();
        assert_eq!(solo.steps.len(), 12);
    }
}
