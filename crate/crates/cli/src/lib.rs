//! Command-line driver: subdivisions, protocol runs, enumeration,
//! specialization, savings comparisons and the verification suite.
//!
//! Every command writes one JSON (or CSV) artifact. Reports carry the hash of
//! the tower they were computed on.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use iis_core::optimizer::{
    random_schedules, savings_report, specialize, task_inputs, DescendantIndex, SpecializationTable,
};
use iis_core::protocols::{standard_inputs, IteratedScan, ObliviousScan, SpecializedScan, WriteScan};
use iis_core::simulator::{
    enumerate_executions, run_protocol, targeted_schedule, ExecutionTrace, ExploreOptions, OpCounts, OrderedPartition,
    Program, RandomConfig, Replay, Schedule, Scheduler,
};
use iis_core::tasks::{verify_decision_map, OutputSimplex, OutputValue, Task, TaskKind};
use iis_core::verify::{run_suite, SuiteConfig};
use iis_core::{Complex, Label, Position, Simplex, StageId, TaskError, Tower};

#[derive(Debug, Parser)]
#[command(
    name = "iis",
    version,
    about = "Chromatic subdivisions and iterated immediate snapshot experiments"
)]
pub struct Cli {
    /// Directory for relative `--out` paths and for commands run without `--out`.
    /// Without it, artifacts go to stdout.
    #[arg(long, global = true, env = "IIS_OUT_DIR")]
    pub out_dir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the tower `I → Ch^K I` and emit a complex with its parent table.
    Subdivide(SubdivideArgs),
    /// Run one protocol under one schedule and emit the trace.
    Run(RunArgs),
    /// Enumerate every interleaving and emit the distinct output simplexes.
    Enumerate(EnumerateArgs),
    /// Build the specialization table of a task.
    Optimize(OptimizeArgs),
    /// Paired generic/specialized runs over random schedules.
    Compare(CompareArgs),
    /// Run the verification suite.
    Verify(VerifyArgs),
    /// Emit a task definition with its decision map as an explicit table.
    DeltaTable(DeltaTableArgs),
}

#[derive(Debug, Args)]
pub struct TowerArgs {
    /// Dimension: processes are `0..=n`.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Number of chromatic subdivision iterations `K`.
    #[arg(long = "iter", default_value_t = 2)]
    pub iterations: usize,
}

#[derive(Debug, Args)]
pub struct SubdivideArgs {
    #[command(flatten)]
    pub tower: TowerArgs,
    /// Emit the complex after stage `k,d` instead of the final one.
    #[arg(long, value_parser = parse_stage)]
    pub stage: Option<StageId>,
    /// Output file; without it and without an output directory, stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolKind {
    /// Multi-round write&scan immediate snapshot.
    Is,
    /// Multi-round write&oblivious-scan immediate snapshot.
    IsPrime,
    /// Iterated immediate snapshot followed by the task's decision map.
    Iis,
    /// The iterated protocol specialized by a table.
    IisOpt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReplayMode {
    /// Follow the schedule exactly; a step by a returned process is an error.
    Strict,
    /// Skip steps of returned processes and finish the others round-robin.
    Project,
}

#[derive(Debug, Args)]
pub struct TaskArgs {
    /// Task: renaming, parent-map or chromatic-agreement. Defaults to renaming
    /// for n = 2, K = 2 and to chromatic agreement otherwise.
    #[arg(long, value_parser = parse_task)]
    pub task: Option<TaskKind>,
    /// Specialization table to use instead of generating one.
    #[arg(long)]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(id = "scheduler", required = true, multiple = false, args = ["schedule", "seed", "partition"])]
pub struct RunArgs {
    /// Protocol to run.
    #[arg(long, value_enum)]
    pub protocol: ProtocolKind,
    #[command(flatten)]
    pub tower: TowerArgs,
    #[command(flatten)]
    pub task: TaskArgs,
    /// Schedule JSON file: `{"steps":[...],"crashes":[[proc,step],...]}`.
    #[arg(long)]
    pub schedule: Option<PathBuf>,
    /// Seed of a random scheduler.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Ordered partition per iteration, e.g. `1,2;0`; repeat for later iterations.
    #[arg(long)]
    pub partition: Vec<String>,
    /// Chance that a process crashes under the random scheduler.
    #[arg(long, default_value_t = 0.0)]
    pub crash_probability: f64,
    /// Random scheduler collects registers in random order.
    #[arg(long)]
    pub random_reads: bool,
    /// How a scripted schedule is followed; `iis-opt` defaults to project.
    #[arg(long, value_enum)]
    pub replay: Option<ReplayMode>,
    /// Output file; without it and without an output directory, stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    /// Protocol to explore.
    #[arg(long, value_enum, default_value = "is-prime")]
    pub protocol: ProtocolKind,
    /// Dimension: processes are `0..=n`.
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Iterations of the iterated protocols; the single-round ones use 1.
    #[arg(long = "iter", default_value_t = 1)]
    pub iterations: usize,
    #[command(flatten)]
    pub task: TaskArgs,
    /// Also report the outputs of every prefix, the other processes crashed.
    #[arg(long)]
    pub crashes: bool,
    /// Branch on the order in which collects read registers.
    #[arg(long)]
    pub branch_reads: bool,
    /// Output file; without it and without an output directory, stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub tower: TowerArgs,
    /// Task: renaming, parent-map or chromatic-agreement. Defaults to renaming
    /// for n = 2, K = 2 and to chromatic agreement otherwise.
    #[arg(long, value_parser = parse_task)]
    pub task: Option<TaskKind>,
    /// Output file; without it and without an output directory, stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub tower: TowerArgs,
    #[command(flatten)]
    pub task: TaskArgs,
    /// Number of random schedules.
    #[arg(long, default_value_t = 1000)]
    pub schedules: usize,
    /// Seed of the first schedule; schedule `i` uses `seed + i`.
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Chance that a process gets a crash point in a schedule.
    #[arg(long, default_value_t = 0.25)]
    pub crash_probability: f64,
    /// Report format: the full JSON report or one CSV row per schedule and process.
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Output file; without it and without an output directory, stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub tower: TowerArgs,
    /// Random schedules per sampled check.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// Seed of the first random schedule.
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Enumerate every interleaving where feasible, including read orders.
    #[arg(long)]
    pub exhaustive: bool,
    /// Chance that a process gets a crash point in a random schedule.
    #[arg(long, default_value_t = 0.2)]
    pub crash_probability: f64,
    /// Check this specialization table instead of the generated one.
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Output file; without it and without an output directory, stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DeltaTableArgs {
    #[command(flatten)]
    pub tower: TowerArgs,
    /// Task: renaming, parent-map or chromatic-agreement.
    #[arg(long, value_parser = parse_task, default_value = "renaming")]
    pub task: TaskKind,
    /// Output file; without it and without an output directory, stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Whether the checks a command performs passed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
        }
    }
}

/// Output of `subdivide`: a complex in the usual JSON form, plus the stage
/// it follows and the parents of its vertices at the start of that
/// iteration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubdivisionReport {
    pub n: usize,
    pub facets: Vec<Simplex>,
    pub iterations: usize,
    pub stage: Option<StageId>,
    pub parents: Vec<(Label, Label)>,
    pub tower_hash: String,
}

impl SubdivisionReport {
    pub fn complex(&self) -> Result<Complex> {
        Ok(Complex::new(self.n, self.facets.clone())?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub protocol: ProtocolKind,
    pub n: usize,
    pub iterations: usize,
    pub task: Option<TaskKind>,
    pub tower_hash: String,
    pub final_vertices: Vec<Option<Label>>,
    pub outputs: Vec<Option<OutputValue>>,
    pub counters: OpCounts,
    pub trace: ExecutionTrace,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumeratedOutput {
    pub simplex: OutputSimplex,
    pub witness: Schedule,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationReport {
    pub protocol: ProtocolKind,
    pub n: usize,
    pub iterations: usize,
    pub task: Option<TaskKind>,
    pub tower_hash: String,
    pub states: usize,
    pub terminal_states: usize,
    /// Every output simplex lies in the expected complex.
    pub valid: bool,
    pub outputs: Vec<EnumeratedOutput>,
}

fn parse_stage(s: &str) -> Result<StageId, String> {
    let (k, d) = s.split_once(',').ok_or_else(|| format!("expected k,d, got {s:?}"))?;
    let k = k.trim().parse().map_err(|e| format!("{s:?}: {e}"))?;
    let d = d.trim().parse().map_err(|e| format!("{s:?}: {e}"))?;
    Ok(StageId::new(k, d))
}

fn parse_task(s: &str) -> Result<TaskKind, String> {
    s.parse().map_err(|e: TaskError| e.to_string())
}

fn default_task(n: usize, iterations: usize) -> TaskKind {
    if n == 2 && iterations == 2 {
        TaskKind::Renaming
    } else {
        TaskKind::ChromaticAgreement
    }
}

fn build_tower(n: usize, iterations: usize) -> Result<Tower> {
    if iterations == 0 {
        bail!("--iter must be at least 1");
    }
    if n > 4 {
        bail!("--n above 4 is out of range");
    }
    Ok(Tower::build(&Complex::standard(n), iterations)?)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_table(path: &Path, tower: &Tower) -> Result<SpecializationTable> {
    let table = SpecializationTable::from_json(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
    if table.tower_hash != tower.hash() {
        bail!("{} was built for a different tower", path.display());
    }
    Ok(table)
}

/// Task and table for the iterated protocols; the table is loaded or generated.
fn task_and_table(args: &TaskArgs, tower: &Tower) -> Result<(Task, SpecializationTable)> {
    let loaded = args.table.as_deref().map(|p| load_table(p, tower)).transpose()?;
    let kind = match (&loaded, args.task) {
        (Some(t), Some(k)) if t.task != k => bail!("table is for {}, not {k}", t.task),
        (Some(t), _) => t.task,
        (None, Some(k)) => k,
        (None, None) => default_task(tower.dim(), tower.iterations()),
    };
    let task = Task::build(kind, tower)?;
    let table = match loaded {
        Some(t) => t,
        None => specialize(&task, tower, &DescendantIndex::build(tower)?)?,
    };
    Ok((task, table))
}

struct Output<'a> {
    out_dir: Option<&'a Path>,
}

impl Output<'_> {
    fn emit(&self, out: Option<&Path>, default_name: &str, content: &str) -> Result<()> {
        let path = match (out, self.out_dir) {
            (Some(p), Some(dir)) if p.is_relative() => Some(dir.join(p)),
            (Some(p), _) => Some(p.to_path_buf()),
            (None, Some(dir)) => Some(dir.join(default_name)),
            (None, None) => None,
        };
        match path {
            Some(p) => {
                if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                    fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
                }
                fs::write(&p, content).with_context(|| format!("writing {}", p.display()))?;
                eprintln!("wrote {}", p.display());
            }
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(content.as_bytes())?;
                if !content.ends_with('\n') {
                    stdout.write_all(b"\n")?;
                }
            }
        }
        Ok(())
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string(value)?)
}

/// Runs a parsed command line. Errors are configuration errors.
pub fn run(cli: Cli) -> Result<Status> {
    let output = Output {
        out_dir: cli.out_dir.as_deref(),
    };
    match cli.command {
        Command::Subdivide(a) => subdivide(&a, &output),
        Command::Run(a) => run_once(&a, &output),
        Command::Enumerate(a) => enumerate(&a, &output),
        Command::Optimize(a) => optimize(&a, &output),
        Command::Compare(a) => compare(&a, &output),
        Command::Verify(a) => verify(&a, &output),
        Command::DeltaTable(a) => delta_table(&a, &output),
    }
}

fn subdivide(a: &SubdivideArgs, output: &Output) -> Result<Status> {
    let tower = build_tower(a.tower.n, a.tower.iterations)?;
    let stage = a.stage.unwrap_or(StageId::new(tower.iterations(), 0));
    let pos = Position::After(stage);
    let complex = tower
        .complex_at(pos)
        .with_context(|| format!("no stage {stage} in this tower"))?;
    let start = tower.iteration_start(stage.k)?;
    let parents = complex
        .vertices()
        .into_iter()
        .map(|v| Ok((v.clone(), tower.composite_parent(pos, start, &v)?)))
        .collect::<Result<Vec<_>>>()?;
    let report = SubdivisionReport {
        n: complex.n(),
        facets: complex.facets().to_vec(),
        iterations: tower.iterations(),
        stage: a.stage,
        parents,
        tower_hash: tower.hash(),
    };
    eprintln!(
        "{} facets, {} vertices after stage {stage}",
        report.facets.len(),
        report.parents.len()
    );
    output.emit(a.out.as_deref(), "subdivision.json", &to_json(&report)?)?;
    Ok(Status::Pass)
}

fn scheduler(a: &RunArgs) -> Result<Scheduler> {
    if let Some(path) = &a.schedule {
        let s: Schedule = serde_json::from_str(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
        return Ok(Scheduler::Scripted(s));
    }
    if let Some(seed) = a.seed {
        if !(0.0..=1.0).contains(&a.crash_probability) {
            bail!("--crash-probability must lie in [0, 1]");
        }
        return Ok(Scheduler::Random(RandomConfig {
            seed,
            crash_probability: a.crash_probability,
            random_reads: a.random_reads,
        }));
    }
    let parts = a
        .partition
        .iter()
        .map(|p| OrderedPartition::parse(p))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Scheduler::Scripted(targeted_schedule(a.tower.n, &parts)?))
}

fn run_once(a: &RunArgs, output: &Output) -> Result<Status> {
    let single_round = matches!(a.protocol, ProtocolKind::Is | ProtocolKind::IsPrime);
    let iterations = if single_round { 1 } else { a.tower.iterations };
    let tower = build_tower(a.tower.n, iterations)?;
    let scheduler = scheduler(a)?;
    let replay = match a.replay {
        Some(ReplayMode::Strict) => Replay::Strict,
        Some(ReplayMode::Project) => Replay::Project,
        None if a.protocol == ProtocolKind::IisOpt => Replay::Project,
        None => Replay::Strict,
    };
    let n = a.tower.n;
    let (task, trace) = match a.protocol {
        ProtocolKind::Is => (
            None,
            run_protocol(&WriteScan { n }, &standard_inputs(n), &scheduler, replay)?,
        ),
        ProtocolKind::IsPrime => (
            None,
            run_protocol(&ObliviousScan { n }, &standard_inputs(n), &scheduler, replay)?,
        ),
        ProtocolKind::Iis | ProtocolKind::IisOpt => {
            let (task, table) = task_and_table(&a.task, &tower)?;
            let inputs = task_inputs(&task)?;
            let trace = if a.protocol == ProtocolKind::Iis {
                let p = IteratedScan {
                    n,
                    iterations,
                    decision: &task.delta,
                };
                run_protocol(&p, &inputs, &scheduler, replay)?
            } else {
                let p = SpecializedScan {
                    n,
                    iterations,
                    decision: &task.delta,
                    table: &table,
                };
                run_protocol(&p, &inputs, &scheduler, replay)?
            };
            (Some(task.task), trace)
        }
    };
    let report = RunReport {
        protocol: a.protocol,
        n,
        iterations,
        task,
        tower_hash: tower.hash(),
        final_vertices: trace.final_vertices(),
        outputs: trace.outcomes.iter().map(|o| o.output().cloned()).collect(),
        counters: trace.counters.clone(),
        trace,
    };
    eprintln!(
        "{} writes, {} reads{}",
        report.counters.total_writes,
        report.counters.total_reads,
        if report.trace.schedule_exhausted {
            ", schedule exhausted"
        } else {
            ""
        }
    );
    output.emit(a.out.as_deref(), "run.json", &to_json(&report)?)?;
    Ok(Status::Pass)
}

type Membership = Box<dyn Fn(&OutputSimplex) -> bool>;

fn enumerate(a: &EnumerateArgs, output: &Output) -> Result<Status> {
    let single_round = matches!(a.protocol, ProtocolKind::Is | ProtocolKind::IsPrime);
    let iterations = if single_round { 1 } else { a.iterations };
    let tower = build_tower(a.n, iterations)?;
    let opts = ExploreOptions {
        crashes: a.crashes,
        branch_reads: a.branch_reads,
        ..ExploreOptions::default()
    };
    let n = a.n;
    let (task, en, valid): (Option<TaskKind>, _, Membership) = match a.protocol {
        ProtocolKind::Is | ProtocolKind::IsPrime => {
            let program: Box<dyn Program> = if a.protocol == ProtocolKind::Is {
                Box::new(WriteScan { n })
            } else {
                Box::new(ObliviousScan { n })
            };
            let en = enumerate_executions(program.as_ref(), &standard_inputs(n), &opts)?;
            let ch = tower.final_complex().clone();
            let member = move |s: &OutputSimplex| s.as_label_simplex().is_some_and(|l| ch.contains(&l));
            (None, en, Box::new(member))
        }
        ProtocolKind::Iis | ProtocolKind::IisOpt => {
            let (task, table) = task_and_table(&a.task, &tower)?;
            let inputs = task_inputs(&task)?;
            let en = if a.protocol == ProtocolKind::Iis {
                enumerate_executions(
                    &IteratedScan {
                        n,
                        iterations,
                        decision: &task.delta,
                    },
                    &inputs,
                    &opts,
                )?
            } else {
                let p = SpecializedScan {
                    n,
                    iterations,
                    decision: &task.delta,
                    table: &table,
                };
                enumerate_executions(&p, &inputs, &opts)?
            };
            let out = task.output.clone();
            (Some(task.task), en, Box::new(move |s: &OutputSimplex| out.contains(s)))
        }
    };
    let outputs: Vec<EnumeratedOutput> = en
        .outputs
        .into_iter()
        .map(|(simplex, witness)| EnumeratedOutput { simplex, witness })
        .collect();
    let bad = outputs
        .iter()
        .filter(|o| !o.simplex.is_empty() && !valid(&o.simplex))
        .count();
    let report = EnumerationReport {
        protocol: a.protocol,
        n,
        iterations,
        task,
        tower_hash: tower.hash(),
        states: en.states,
        terminal_states: en.terminal_states,
        valid: bad == 0,
        outputs,
    };
    eprintln!(
        "{} states, {} distinct output simplexes, {bad} outside the expected complex",
        report.states,
        report.outputs.len()
    );
    output.emit(a.out.as_deref(), "enumeration.json", &to_json(&report)?)?;
    Ok(if report.valid { Status::Pass } else { Status::Fail })
}

fn optimize(a: &OptimizeArgs, output: &Output) -> Result<Status> {
    let tower = build_tower(a.tower.n, a.tower.iterations)?;
    let args = TaskArgs {
        task: a.task,
        table: None,
    };
    let (_, table) = task_and_table(&args, &tower)?;
    eprintln!(
        "{}: {} entries, {} decide",
        table.task,
        table.len(),
        table.decide_count()
    );
    output.emit(a.out.as_deref(), "table.json", &table.to_json())?;
    Ok(Status::Pass)
}

fn compare(a: &CompareArgs, output: &Output) -> Result<Status> {
    if !(0.0..=1.0).contains(&a.crash_probability) {
        bail!("--crash-probability must lie in [0, 1]");
    }
    let tower = build_tower(a.tower.n, a.tower.iterations)?;
    let (task, table) = task_and_table(&a.task, &tower)?;
    let schedules = random_schedules(&task, a.schedules, a.seed, a.crash_probability)?;
    let report = match savings_report(&task, &table, &schedules) {
        Ok(r) => r,
        Err(e @ TaskError::OutputMismatch { .. }) => {
            eprintln!("FAIL: {e}");
            return Ok(Status::Fail);
        }
        Err(e) => return Err(e.into()),
    };
    eprintln!(
        "{} runs, {} -> {} operations ({:.1}% saved)",
        report.runs.len(),
        report.generic_ops,
        report.optimized_ops,
        100.0 * report.saved_fraction()
    );
    let content = match a.format {
        Format::Json => to_json(&report)?,
        Format::Csv => savings_csv(&report)?,
    };
    let name = match a.format {
        Format::Json => "savings.json",
        Format::Csv => "savings.csv",
    };
    output.emit(a.out.as_deref(), name, &content)?;
    Ok(if report.all_dominated() {
        Status::Pass
    } else {
        Status::Fail
    })
}

#[derive(Serialize)]
struct SavingsRow {
    schedule_id: usize,
    process: usize,
    generic_writes: usize,
    generic_reads: usize,
    replay_writes: usize,
    replay_reads: usize,
    optimized_writes: usize,
    optimized_reads: usize,
    identical_outputs: bool,
    dominated: bool,
}

/// One row per schedule and process.
pub fn savings_csv(report: &iis_core::optimizer::SavingsReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &report.runs {
        for p in 0..r.generic.writes.len() {
            w.serialize(SavingsRow {
                schedule_id: r.schedule_id,
                process: p,
                generic_writes: r.generic.writes[p],
                generic_reads: r.generic.reads[p],
                replay_writes: r.replay.writes[p],
                replay_reads: r.replay.reads[p],
                optimized_writes: r.optimized.writes[p],
                optimized_reads: r.optimized.reads[p],
                identical_outputs: r.identical_outputs,
                dominated: r.dominated,
            })?;
        }
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn verify(a: &VerifyArgs, output: &Output) -> Result<Status> {
    if a.tower.iterations == 0 {
        bail!("--iter must be at least 1");
    }
    if a.tower.n > 2 {
        bail!("the verification suite supports n ≤ 2");
    }
    if !(0.0..=1.0).contains(&a.crash_probability) {
        bail!("--crash-probability must lie in [0, 1]");
    }
    let table = match &a.table {
        Some(path) => {
            let tower = build_tower(a.tower.n, a.tower.iterations)?;
            Some(load_table(path, &tower)?)
        }
        None => None,
    };
    let cfg = SuiteConfig {
        n: a.tower.n,
        iterations: a.tower.iterations,
        samples: a.samples,
        seed: a.seed,
        exhaustive: a.exhaustive,
        crash_probability: a.crash_probability,
        table,
    };
    let report = run_suite(&cfg)?;
    for c in &report.checks {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        eprintln!("{verdict} {} ({} runs) {}", c.name, c.runs, c.detail);
        if let Some(v) = &c.violation {
            eprintln!("  {}", v.detail);
            if let Some(w) = &v.witness {
                eprintln!("  witness {}", w.to_json());
            }
        }
    }
    output.emit(a.out.as_deref(), "verify.json", &to_json(&report)?)?;
    Ok(if report.passed() { Status::Pass } else { Status::Fail })
}

fn delta_table(a: &DeltaTableArgs, output: &Output) -> Result<Status> {
    let tower = build_tower(a.tower.n, a.tower.iterations)?;
    let task = Task::build(a.task, &tower)?;
    let check = verify_decision_map(&task, &tower)?;
    eprintln!(
        "{}: {} vertices, {} simplexes checked, {} violations",
        task.task,
        task.delta.len(),
        check.simplices_checked,
        check.violations.len()
    );
    output.emit(a.out.as_deref(), "task.json", &task.to_json())?;
    Ok(if check.is_ok() { Status::Pass } else { Status::Fail })
}
