//! Trace-level property checks and the verification suite.
//!
//! Every check returns `Err(Violation)` with a replayable witness schedule
//! where one exists. [`run_suite`] drives all of them for one configuration
//! and collects a machine-readable report.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::complex::{Complex, Simplex};
use crate::error::TaskError;
use crate::label::{Color, Label};
use crate::optimizer::{
    check_soundness_exhaustive, paired_run, random_schedules, specialize, task_inputs, DescendantIndex,
    SpecializationTable, TableEntry,
};
use crate::oracle::{ch_oracle_is_simplex, chromatic_by_partitions, facet_of_partition, fubini, ordered_partitions};
use crate::protocols::{standard_inputs, IteratedScan, ObliviousScan, WriteScan};
use crate::simulator::{
    enumerate_executions, for_each_execution, run_protocol, Action, ExecutionTrace, ExploreOptions, OrderedPartition,
    Outcome, Program, RandomConfig, Replay, Schedule, ScheduleStep, Scheduler,
};
use crate::subdivision::{schlegel_simplex, Position, StageId, Tower};
use crate::tasks::{verify_decision_map, OutputSimplex, OutputValue, Task, TaskKind};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub check: String,
    pub detail: String,
    pub witness: Option<Schedule>,
}

impl Violation {
    fn new(check: &str, detail: impl Into<String>) -> Violation {
        Violation {
            check: check.to_string(),
            detail: detail.into(),
            witness: None,
        }
    }

    fn on(check: &str, detail: impl Into<String>, trace: &ExecutionTrace) -> Violation {
        Violation {
            witness: Some(trace.schedule.clone()),
            ..Violation::new(check, detail)
        }
    }
}

type Checked = Result<(), Violation>;

fn simplex_or(
    check: &str,
    labels: impl IntoIterator<Item = Label>,
    trace: &ExecutionTrace,
) -> Result<Simplex, Violation> {
    Simplex::new(labels).map_err(|e| Violation::on(check, format!("not a chromatic set: {e}"), trace))
}

/// `Sch^{0,d}` composition equals the ordered-partition construction, and
/// every facet passes the containment/immediacy test.
pub fn schlegel_composition(d: usize) -> Checked {
    let base = Complex::standard(d);
    let tower = Tower::build(&base, 1).map_err(|e| Violation::new("schlegel-composition", e.to_string()))?;
    let oracle = chromatic_by_partitions(&base).map_err(|e| Violation::new("schlegel-composition", e.to_string()))?;
    if tower.final_complex() != &oracle {
        return Err(Violation::new(
            "schlegel-composition",
            format!("d={d}: Schlegel composition and partition facets differ"),
        ));
    }
    let sigma = &base.facets()[0];
    for f in oracle.facets() {
        if !ch_oracle_is_simplex(sigma, f.vertices()).unwrap_or(false) {
            return Err(Violation::new(
                "schlegel-composition",
                format!("d={d}: {f} fails the immediacy test"),
            ));
        }
    }
    Ok(())
}

/// Facet counts of `Sch^d Δ^d`, `Ch Δ^d` and `Ch² Δ²`.
pub fn subdivision_counts(max_d: usize) -> Checked {
    for d in 0..=max_d {
        let sigma = Simplex::from_colors(0..=d).expect("distinct colors");
        let sch = schlegel_simplex(&sigma, d).facets().len();
        if sch != (1 << (d + 1)) - 1 {
            return Err(Violation::new(
                "subdivision-counts",
                format!("Sch^{d} has {sch} facets"),
            ));
        }
        let ch = Tower::build(&Complex::standard(d), 1)
            .map_err(|e| Violation::new("subdivision-counts", e.to_string()))?
            .final_complex()
            .facets()
            .len();
        if ch as u64 != fubini(d + 1) {
            return Err(Violation::new(
                "subdivision-counts",
                format!("Ch Δ^{d} has {ch} facets"),
            ));
        }
    }
    if max_d >= 2 {
        let ch2 =
            Tower::build(&Complex::standard(2), 2).map_err(|e| Violation::new("subdivision-counts", e.to_string()))?;
        if ch2.final_complex().facets().len() != 169 {
            return Err(Violation::new("subdivision-counts", "Ch² Δ² does not have 169 facets"));
        }
    }
    Ok(())
}

/// The final vertices of the processes that returned form a simplex of `target`.
pub fn output_membership(check: &str, trace: &ExecutionTrace, target: &Complex) -> Checked {
    let tau = simplex_or(check, trace.final_vertices().into_iter().flatten(), trace)?;
    if !target.contains(&tau) {
        return Err(Violation::on(
            check,
            format!("outputs {tau} are not a simplex of the protocol complex"),
            trace,
        ));
    }
    Ok(())
}

/// One write&collect round of one process, as read off a trace.
#[derive(Clone, Debug)]
struct Round {
    stage: StageId,
    written: Label,
    observed: Vec<Label>,
    reads: usize,
}

impl Round {
    fn complete(&self, n: usize) -> bool {
        self.reads == n + 1
    }

    /// The write&oblivious scan result of a completed round.
    fn result(&self, pid: usize) -> Label {
        if self.observed.len() == self.stage.d + 1 {
            Label::pair(pid, self.observed.iter().cloned()).expect("distinct writers")
        } else {
            self.written.clone()
        }
    }
}

fn rounds(trace: &ExecutionTrace) -> Vec<Vec<Round>> {
    let mut out: Vec<Vec<Round>> = vec![Vec::new(); trace.n + 1];
    for s in &trace.steps {
        let rs = &mut out[s.process];
        match &s.action {
            Action::Write { stage, value } => rs.push(Round {
                stage: *stage,
                written: value.clone(),
                observed: Vec::new(),
                reads: 0,
            }),
            Action::Read { observed, .. } => {
                let r = rs.last_mut().expect("reads follow a write");
                r.reads += 1;
                if let Some(l) = observed {
                    r.observed.push(l.clone());
                }
            }
        }
    }
    for rs in &mut out {
        for r in rs {
            r.observed.sort();
        }
    }
    out
}

/// Every round array written by `d+1` distinct processes: the completed scan
/// results lie in `Sch^d` of the written values.
pub fn round_snapshot(trace: &ExecutionTrace) -> Checked {
    let rounds = rounds(trace);
    let mut by_stage: BTreeMap<StageId, (Vec<Label>, Vec<Label>)> = BTreeMap::new();
    for (p, rs) in rounds.iter().enumerate() {
        for r in rs {
            let e = by_stage.entry(r.stage).or_default();
            e.0.push(r.written.clone());
            if r.complete(trace.n) {
                e.1.push(r.result(p));
            }
        }
    }
    for (stage, (written, results)) in by_stage {
        if written.len() > stage.d + 1 {
            return Err(Violation::on(
                "round-snapshot",
                format!("{} processes wrote mem{stage}", written.len()),
                trace,
            ));
        }
        if written.len() != stage.d + 1 {
            continue;
        }
        let sigma = simplex_or("round-snapshot", written, trace)?;
        let tau = simplex_or("round-snapshot", results, trace)?;
        if !schlegel_simplex(&sigma, stage.d).contains(&tau) {
            return Err(Violation::on(
                "round-snapshot",
                format!("round {stage}: {tau} is not in Sch^{} {sigma}", stage.d),
                trace,
            ));
        }
    }
    Ok(())
}

/// Nesting of round views and results on a single-iteration trace; `tower` is the one-step
/// tower over `cls` of the inputs.
pub fn round_nesting(trace: &ExecutionTrace, tower: &Tower) -> Checked {
    let n = trace.n;
    let rounds = rounds(trace);
    let inputs = simplex_or("round-nesting", trace.inputs.iter().cloned(), trace)?;
    let mut sigma: Vec<Vec<Label>> = vec![Vec::new(); n + 2];
    sigma[n + 1] = inputs.vertices().to_vec();
    let mut returned_at = vec![None; n + 1];
    for (p, rs) in rounds.iter().enumerate() {
        for r in rs {
            if r.stage.k != 1 {
                return Err(Violation::on(
                    "round-nesting",
                    "trace has more than one iteration",
                    trace,
                ));
            }
            if r.complete(n) {
                sigma[r.stage.d].push(r.result(p));
            }
        }
        if let Outcome::Returned { vertex, .. } = &trace.outcomes[p] {
            let last = rs
                .last()
                .ok_or_else(|| Violation::on("round-nesting", "returned without a round", trace))?;
            returned_at[p] = Some((last.stage.d, vertex.clone()));
        }
    }
    let sigma = sigma
        .into_iter()
        .map(|s| simplex_or("round-nesting", s, trace))
        .collect::<Result<Vec<_>, _>>()?;
    let tau = |d: usize| -> Vec<Label> {
        returned_at
            .iter()
            .flatten()
            .filter(|(r, _)| *r >= d)
            .map(|(_, v)| v.clone())
            .collect()
    };
    for (d, s) in sigma.iter().enumerate() {
        let common = s.intersection(&inputs);
        if common.len() > d {
            return Err(Violation::on(
                "round-nesting",
                format!("view bound d={d}: dim({common}) ≥ {d}"),
                trace,
            ));
        }
    }
    for d in (0..=n).rev() {
        let td = simplex_or("round-nesting", tau(d), trace)?;
        let td1 = simplex_or("round-nesting", tau(d + 1), trace)?;
        let fresh = sigma[d].difference(&inputs);
        let joined = td1
            .join(&fresh)
            .map_err(|e| Violation::on("round-nesting", format!("returned set d={d}: {e}"), trace))?;
        if joined != td || !td.intersection(&inputs).is_empty() {
            return Err(Violation::on(
                "round-nesting",
                format!("returned set d={d}: τ_d = {td}, τ_(d+1) ∗ (σ_d ∖ σ_(n+1)) = {joined}"),
                trace,
            ));
        }
        let s = td1
            .join(&sigma[d])
            .map_err(|e| Violation::on("round-nesting", format!("subdivision d={d}: {e}"), trace))?;
        let at = tower
            .complex_at(Position::After(StageId::new(1, d)))
            .map_err(|e| Violation::on("round-nesting", e.to_string(), trace))?;
        if !at.contains(&s) {
            return Err(Violation::on(
                "round-nesting",
                format!("subdivision d={d}: {s} is not in the subdivision after round {d}"),
                trace,
            ));
        }
    }
    Ok(())
}

/// Write&scan and write&oblivious-scan give the same outputs and operation
/// counts under the same schedule.
pub fn scan_equivalence(n: usize, schedule: &Schedule) -> Checked {
    let inputs = standard_inputs(n);
    let sched = Scheduler::Scripted(schedule.clone());
    let a = run_protocol(&WriteScan { n }, &inputs, &sched, Replay::Strict)
        .map_err(|e| Violation::new("scan-equivalence", format!("write&scan: {e}")))?;
    let b = run_protocol(&ObliviousScan { n }, &inputs, &sched, Replay::Strict)
        .map_err(|e| Violation::new("scan-equivalence", format!("write&oblivious scan: {e}")))?;
    if a.outcomes != b.outcomes || a.counters != b.counters {
        return Err(Violation {
            witness: Some(schedule.clone()),
            ..Violation::new("scan-equivalence", "outputs differ")
        });
    }
    Ok(())
}

fn full(i: usize) -> Label {
    Label::pair(i, (0..=2).map(Label::base)).expect("valid")
}

fn covers_both(v: &Label) -> bool {
    v.view().is_some_and(|t| t.contains(&full(1)) && t.contains(&full(2)))
}

fn is_pair(v: &Label, i: usize, view: &[usize]) -> bool {
    Label::pair(i, view.iter().map(|&j| Label::base(j))).is_ok_and(|l| &l == v)
}

/// The early-return clauses of the hand-specialized renaming code, read as
/// checks made after round `completed` has left the process holding `v`.
pub fn renaming_rule(pid: usize, completed: StageId, v: &Label) -> Option<u32> {
    let (k, d) = (completed.k, completed.d);
    match pid {
        0 => {
            if v == &full(0) {
                Some(4)
            } else if d == 1 && v == &Label::base(0) {
                Some(0)
            } else if d == 1 {
                Some(2)
            } else {
                None
            }
        }
        1 | 2 => {
            let own = Label::base(pid);
            if k == 1 && d == 1 && v == &own {
                Some(0)
            } else if pid == 1 && k == 1 && is_pair(v, 1, &[0, 1]) {
                Some(1)
            } else if pid == 1 && k == 1 && is_pair(v, 1, &[1, 2]) {
                Some(2)
            } else if pid == 2 && k == 1 && (is_pair(v, 2, &[0, 2]) || is_pair(v, 2, &[1, 2])) {
                Some(1)
            } else if k == 2 && v.color().0 == pid && covers_both(v) {
                Some(if pid == 1 { 2 } else { 1 })
            } else if k == 2 && d == 1 {
                Some(3)
            } else {
                None
            }
        }
        _ => None,
    }
}

/// On a generic renaming trace, the table decides no later than the
/// hand-specialized code would and with the same output.
pub fn renaming_rule_conformance(trace: &ExecutionTrace, table: &SpecializationTable) -> Checked {
    let n = trace.n;
    for (p, rs) in rounds(trace).iter().enumerate() {
        let output = trace.outcomes[p].output();
        let table_first = rs
            .iter()
            .enumerate()
            .find_map(|(j, r)| match table.lookup(Color(p), r.stage, &r.written) {
                Some(TableEntry::Decide(u)) => Some((j, u.clone())),
                _ => None,
            });
        let mut rule = None;
        for (j, r) in rs.iter().enumerate() {
            if !r.complete(n) {
                break;
            }
            let after = match (rs.get(j + 1), &trace.outcomes[p]) {
                (Some(next), _) => next.written.clone(),
                (None, Outcome::Returned { vertex, .. }) => vertex.clone(),
                _ => break,
            };
            if let Some(u) = renaming_rule(p, r.stage, &after) {
                rule = Some((j + 1, OutputValue::Name(u)));
                break;
            }
        }
        if let (Some(out), Some((_, u))) = (output, &rule) {
            if out != u {
                return Err(Violation::on(
                    "renaming-rules",
                    format!("process {p}: clause gives {u}, δ gives {out}"),
                    trace,
                ));
            }
        }
        if let (Some(out), Some((_, t))) = (output, &table_first) {
            if out != t {
                return Err(Violation::on(
                    "renaming-rules",
                    format!("process {p}: table gives {t}, δ gives {out}"),
                    trace,
                ));
            }
        }
        if let Some((a, u)) = rule {
            if a < rs.len() {
                match &table_first {
                    Some((j, t)) if *j <= a && *t == u => {}
                    other => {
                        return Err(Violation::on(
                            "renaming-rules",
                            format!("process {p}: clause decides {u} before round {a}, table gives {other:?}"),
                            trace,
                        ))
                    }
                }
            }
        }
    }
    Ok(())
}

/// Outputs of a renaming trace are distinct names in `0..=4`.
pub fn renaming_outputs(trace: &ExecutionTrace) -> Checked {
    let mut seen = BTreeSet::new();
    for o in trace.outcomes.iter().filter_map(Outcome::output) {
        match o {
            OutputValue::Name(m) if *m <= 4 && seen.insert(*m) => {}
            _ => {
                return Err(Violation::on(
                    "renaming",
                    format!("output {o} repeated or out of range"),
                    trace,
                ))
            }
        }
    }
    Ok(())
}

/// A schedule in which only `p` moves; the others crash before their first step.
pub fn solo_schedule(n: usize, p: usize, max_actions: usize) -> Schedule {
    let mut s = Schedule::from_processes(std::iter::repeat_n(p, max_actions));
    for q in (0..=n).filter(|&q| q != p) {
        s = s.with_crash(q, 0);
    }
    s
}

/// Result of one named check in the suite.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub runs: usize,
    pub detail: String,
    pub violation: Option<Violation>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub n: usize,
    pub iterations: usize,
    pub seed: u64,
    pub tower_hash: String,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub n: usize,
    pub iterations: usize,
    pub samples: usize,
    pub seed: u64,
    /// Also enumerate every interleaving where that is feasible (`n ≤ 1`
    /// for unmemoized trace checks).
    pub exhaustive: bool,
    pub crash_probability: f64,
    /// Check this table instead of the generated one.
    pub table: Option<SpecializationTable>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            n: 2,
            iterations: 2,
            samples: 10_000,
            seed: 7,
            exhaustive: false,
            crash_probability: 0.2,
            table: None,
        }
    }
}

#[derive(Default)]
struct Tally {
    runs: usize,
    first: Option<Violation>,
    notes: Vec<String>,
}

impl Tally {
    fn record(&mut self, r: Checked) {
        self.runs += 1;
        if let Err(v) = r {
            if self.first.is_none() {
                self.first = Some(v);
            }
        }
    }

    fn fail(&mut self, v: Violation) {
        self.record(Err(v));
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn finish(self, name: &str) -> CheckResult {
        CheckResult {
            name: name.to_string(),
            passed: self.first.is_none(),
            runs: self.runs,
            detail: self.notes.join("; "),
            violation: self.first,
        }
    }
}

fn random_cfg(seed: u64, crash_probability: f64) -> Scheduler {
    Scheduler::Random(RandomConfig {
        seed,
        crash_probability,
        random_reads: true,
    })
}

fn targeted(n: usize, parts: &[Vec<Vec<Label>>]) -> Result<Schedule, TaskError> {
    let parts: Vec<OrderedPartition> = parts
        .iter()
        .map(|p| OrderedPartition(p.iter().map(|b| b.iter().map(|l| l.color().0).collect()).collect()))
        .collect();
    Ok(crate::simulator::targeted_schedule(n, &parts)?)
}

/// Single-iteration checks: output membership, round snapshots, round nesting and scan equivalence.
fn check_single_round(cfg: &SuiteConfig, out: &mut Vec<CheckResult>) -> Result<(), TaskError> {
    let n = cfg.n;
    let inputs = standard_inputs(n);
    let tower = Tower::build(&Complex::standard(n), 1)?;
    let ch = tower.final_complex();
    let program = ObliviousScan { n };
    let (mut outs, mut l1, mut l2, mut eq) = (Tally::default(), Tally::default(), Tally::default(), Tally::default());
    let per_trace = |t: &ExecutionTrace, outs: &mut Tally, l1: &mut Tally, l2: &mut Tally, eq: &mut Tally| {
        outs.record(output_membership("protocol-outputs", t, ch));
        l1.record(round_snapshot(t));
        l2.record(round_nesting(t, &tower));
        eq.record(scan_equivalence(n, &t.schedule));
    };

    let memo_feasible = n <= 2;
    if memo_feasible {
        for crashes in [false, true] {
            let opts = ExploreOptions {
                crashes,
                branch_reads: n <= 1,
                ..ExploreOptions::default()
            };
            let e = enumerate_executions(&program, &inputs, &opts)?;
            let expected: BTreeSet<OutputSimplex> = if crashes {
                ch.simplices().iter().map(OutputSimplex::from_label_simplex).collect()
            } else {
                ch.facets().iter().map(OutputSimplex::from_label_simplex).collect()
            };
            let got: BTreeSet<OutputSimplex> = e.outputs.keys().cloned().collect();
            outs.runs += e.states;
            for (o, w) in &e.outputs {
                if !expected.contains(o) {
                    outs.fail(Violation {
                        witness: Some(w.clone()),
                        ..Violation::new("protocol-outputs", format!("enumerated output {o} is not in Ch"))
                    });
                }
            }
            if n <= 1 && got != expected {
                outs.fail(Violation::new(
                    "protocol-outputs",
                    format!(
                        "crashes={crashes}: {} outputs enumerated, {} expected",
                        got.len(),
                        expected.len()
                    ),
                ));
            }
            outs.note(format!(
                "enumerated {} states, {} distinct outputs (crashes={crashes})",
                e.states,
                got.len()
            ));
        }
    }

    if n <= 1 {
        let count = for_each_execution(&program, &inputs, true, |t| {
            per_trace(t, &mut outs, &mut l1, &mut l2, &mut eq);
            Ok(())
        })?;
        outs.note(format!("{count} exhaustive traces"));
    }

    let sigma = Simplex::from_colors(0..=n).expect("distinct colors");
    for part in ordered_partitions(sigma.vertices()) {
        let sched = targeted(n, std::slice::from_ref(&part))?;
        let t = run_protocol(&program, &inputs, &Scheduler::Scripted(sched), Replay::Strict)?;
        let want = facet_of_partition(&part)?;
        let got = Simplex::new(t.final_vertices().into_iter().flatten())?;
        if got != want {
            outs.fail(Violation::on(
                "protocol-outputs",
                format!("targeted schedule gave {got}, expected {want}"),
                &t,
            ));
        }
        per_trace(&t, &mut outs, &mut l1, &mut l2, &mut eq);
    }
    outs.note(format!("{} targeted partitions", fubini(n + 1)));

    for i in 0..cfg.samples as u64 {
        let t = run_protocol(
            &program,
            &inputs,
            &random_cfg(cfg.seed.wrapping_add(i), cfg.crash_probability),
            Replay::Strict,
        )?;
        per_trace(&t, &mut outs, &mut l1, &mut l2, &mut eq);
    }
    outs.note(format!("{} random traces", cfg.samples));

    out.push(outs.finish("protocol-outputs"));
    out.push(l1.finish("round-snapshot"));
    out.push(l2.finish("round-nesting"));
    out.push(eq.finish("scan-equivalence"));
    Ok(())
}

fn default_task(n: usize, iterations: usize) -> TaskKind {
    if n == 2 && iterations == 2 {
        TaskKind::Renaming
    } else {
        TaskKind::ChromaticAgreement
    }
}

/// Iterated-protocol checks on the task: membership in `Ch^K`, snapshot
/// properties of every round, renaming properties, rule conformance, optimizer
/// paired runs.
fn check_iterated(cfg: &SuiteConfig, tower: &Tower, out: &mut Vec<CheckResult>) -> Result<(), TaskError> {
    let n = cfg.n;
    let kind = cfg.table.as_ref().map_or(default_task(n, cfg.iterations), |t| t.task);
    let task = Task::build(kind, tower)?;
    let table = match &cfg.table {
        Some(t) => {
            if t.tower_hash != tower.hash() {
                return Err(TaskError::Invalid("table was built for a different tower".into()));
            }
            t.clone()
        }
        None => specialize(&task, tower, &DescendantIndex::build(tower)?)?,
    };
    let program = IteratedScan {
        n,
        iterations: cfg.iterations,
        decision: &task.delta,
    };
    let inputs = task_inputs(&task)?;
    let renaming = kind == TaskKind::Renaming;

    let mut schedules = random_schedules(&task, cfg.samples, cfg.seed, cfg.crash_probability)?;
    let sigma = Simplex::from_colors(0..=n).expect("distinct colors");
    let parts = ordered_partitions(sigma.vertices());
    let mut combos: Vec<Vec<Vec<Vec<Label>>>> = vec![Vec::new()];
    for _ in 0..cfg.iterations {
        combos = combos
            .into_iter()
            .flat_map(|c| {
                parts.iter().map(move |p| {
                    let mut c = c.clone();
                    c.push(p.clone());
                    c
                })
            })
            .collect();
        if combos.len() > 5000 {
            break;
        }
    }
    for c in combos.iter().filter(|c| c.len() == cfg.iterations) {
        schedules.push(targeted(n, c)?);
    }
    for p in 0..=n {
        schedules.push(solo_schedule(n, p, program.max_actions()));
    }

    let (mut member, mut l1, mut ren, mut rule, mut paired) = (
        Tally::default(),
        Tally::default(),
        Tally::default(),
        Tally::default(),
        Tally::default(),
    );
    let (mut generic_ops, mut optimized_ops) = (0usize, 0usize);
    for (i, s) in schedules.iter().enumerate() {
        let t = run_protocol(&program, &inputs, &Scheduler::Scripted(s.clone()), Replay::Project)?;
        member.record(output_membership("iterated-membership", &t, tower.final_complex()));
        l1.record(round_snapshot(&t));
        if renaming {
            ren.record(renaming_outputs(&t));
            if cfg.table.is_none() {
                rule.record(renaming_rule_conformance(&t, &table));
            }
        }
        match paired_run(&task, &table, &t.schedule, i) {
            Ok(r) => {
                generic_ops += r.replay.total();
                optimized_ops += r.optimized.total();
                if !r.dominated {
                    paired.fail(Violation::on(
                        "optimizer-paired",
                        "optimized run used more operations",
                        &t,
                    ));
                } else {
                    paired.record(Ok(()));
                }
            }
            Err(e) => paired.fail(Violation::on("optimizer-paired", e.to_string(), &t)),
        }
    }
    if renaming {
        for p in 0..=n {
            let t = run_protocol(
                &program,
                &inputs,
                &Scheduler::Scripted(solo_schedule(n, p, program.max_actions())),
                Replay::Project,
            )?;
            if t.outcomes[p].output() != Some(&OutputValue::Name(0)) {
                ren.fail(Violation::on(
                    "renaming",
                    format!("solo process {p} did not output 0"),
                    &t,
                ));
            }
        }
    }
    member.note(format!("{} schedules", schedules.len()));
    paired.note(format!(
        "same-environment generic {generic_ops} ops, optimized {optimized_ops} ops, {} table entries, {} decide",
        table.len(),
        table.decide_count()
    ));
    out.push(member.finish("iterated-membership"));
    out.push(l1.finish("round-snapshot-iterated"));
    if renaming {
        out.push(ren.finish("renaming"));
        if cfg.table.is_none() {
            out.push(rule.finish("renaming-rules"));
        }
    }
    let mut dm = Tally::default();
    let report = verify_decision_map(&task, tower)?;
    dm.runs = report.simplices_checked;
    if let Some(v) = report.violations.first() {
        dm.fail(Violation::new("decision-map", format!("{}: {}", v.simplex, v.reason)));
    }
    out.push(dm.finish("decision-map"));
    out.push(paired.finish("optimizer-paired"));
    Ok(())
}

/// Exhaustive soundness of generated tables on small instances, plus the
/// degenerate-task shape checks.
fn check_soundness(cfg: &SuiteConfig, out: &mut Vec<CheckResult>) -> Result<(), TaskError> {
    let mut sound = Tally::default();
    let mut degenerate = Tally::default();
    let mut instances: Vec<(usize, usize, TaskKind)> = Vec::new();
    for (n, k) in [(1, 1), (1, 2), (2, 1)] {
        for kind in [TaskKind::ParentMap, TaskKind::ChromaticAgreement] {
            instances.push((n, k, kind));
        }
    }
    let main_kind = cfg
        .table
        .as_ref()
        .map_or(default_task(cfg.n, cfg.iterations), |t| t.task);
    let main = (cfg.n, cfg.iterations, main_kind);
    if cfg.n <= 2 && cfg.iterations <= 2 && !instances.contains(&main) {
        instances.push(main);
    }
    for (n, k, kind) in instances {
        let tower = Tower::build(&Complex::standard(n), k)?;
        let idx = DescendantIndex::build(&tower)?;
        let task = Task::build(kind, &tower)?;
        let table = match &cfg.table {
            Some(t) if t.task == kind && t.tower_hash == tower.hash() => t.clone(),
            _ => specialize(&task, &tower, &idx)?,
        };
        let branch_reads = n <= 1 || cfg.exhaustive;
        let r = check_soundness_exhaustive(&task, &table, branch_reads)?;
        sound.runs += r.states;
        if let Some(v) = r.violation {
            sound.fail(Violation {
                witness: Some(v.witness.clone()),
                ..Violation::new(
                    "optimizer-soundness",
                    format!(
                        "{kind} n={n} K={k}: process {} at {} holding {} is told {} but can reach {:?}",
                        v.pid, v.stage, v.vertex, v.table_says, v.reachable
                    ),
                )
            });
        }
        sound.note(format!(
            "{kind} n={n} K={k}: {} states, {} decisions",
            r.states, r.decisions_checked
        ));
        degenerate.record(degenerate_shape(&task, &table));
    }
    out.push(sound.finish("optimizer-soundness"));
    out.push(degenerate.finish("degenerate-tasks"));
    Ok(())
}

/// Parent-map tables decide every process on entry; chromatic-agreement
/// tables decide only at the last round of the last iteration.
pub fn degenerate_shape(task: &Task, table: &SpecializationTable) -> Checked {
    let last = StageId::new(task.iterations, 0);
    for (pid, stage, v, e) in table.entries() {
        let decide = matches!(e, TableEntry::Decide(_));
        let bad = match task.task {
            TaskKind::ParentMap => stage == StageId::new(1, task.n) && !decide,
            TaskKind::ChromaticAgreement => decide != (stage == last),
            TaskKind::Renaming => false,
        };
        if bad {
            return Err(Violation::new(
                "degenerate-tasks",
                format!("{}: entry ({pid}, {stage}, {v}) is {e:?}", task.task),
            ));
        }
    }
    if task.task == TaskKind::ParentMap {
        let inputs = task_inputs(task).map_err(|e| Violation::new("degenerate-tasks", e.to_string()))?;
        let program = crate::protocols::SpecializedScan {
            n: task.n,
            iterations: task.iterations,
            decision: &task.delta,
            table,
        };
        let t = run_protocol(
            &program,
            &inputs,
            &Scheduler::Random(RandomConfig::new(0)),
            Replay::Strict,
        )
        .map_err(|e| Violation::new("degenerate-tasks", e.to_string()))?;
        if t.counters.total() != 0 {
            return Err(Violation::on(
                "degenerate-tasks",
                "parent-map protocol touched memory",
                &t,
            ));
        }
    }
    Ok(())
}

/// Runs every check for one configuration.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport, TaskError> {
    if cfg.iterations == 0 {
        return Err(TaskError::Invalid("at least one iteration is required".into()));
    }
    let tower = Tower::build(&Complex::standard(cfg.n), cfg.iterations)?;
    let mut checks = Vec::new();

    let mut counts = Tally::default();
    counts.record(subdivision_counts(cfg.n.min(2)));
    checks.push(counts.finish("subdivision-counts"));
    let mut t2 = Tally::default();
    for d in 0..=cfg.n.min(2) {
        t2.record(schlegel_composition(d));
    }
    checks.push(t2.finish("schlegel-composition"));

    check_single_round(cfg, &mut checks)?;
    check_iterated(cfg, &tower, &mut checks)?;
    check_soundness(cfg, &mut checks)?;

    Ok(SuiteReport {
        n: cfg.n,
        iterations: cfg.iterations,
        seed: cfg.seed,
        tower_hash: tower.hash(),
        checks,
    })
}

/// The schedule steps of a trace, for display.
pub fn schedule_processes(s: &Schedule) -> Vec<usize> {
    s.steps.iter().map(|x: &ScheduleStep| x.process()).collect()
}
