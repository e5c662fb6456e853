use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use iis_cli::{EnumerationReport, RunReport, SubdivisionReport};
use iis_core::optimizer::{SavingsReport, SpecializationTable, TableEntry};
use iis_core::tasks::{OutputValue, Task};
use iis_core::verify::SuiteReport;
use iis_core::{Complex, Tower};
use serde::de::DeserializeOwned;
use serde::Serialize;

fn iis(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iis"))
        .args(args)
        .env_remove("IIS_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Parses `path` as `T` and checks that writing it back gives the same bytes.
fn round_trip<T: Serialize + DeserializeOwned>(path: &Path) -> T {
    let text = fs::read_to_string(path).unwrap();
    let value: T = serde_json::from_str(&text).unwrap();
    assert_eq!(
        serde_json::to_string(&value).unwrap(),
        text,
        "{} does not round-trip",
        path.display()
    );
    value
}

fn hash(n: usize, k: usize) -> String {
    Tower::build(&Complex::standard(n), k).unwrap().hash()
}

#[test]
fn subdivide_emits_the_complex_and_parents() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ch.json");
    let o = iis(&["subdivide", "--n", "2", "--iter", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r: SubdivisionReport = round_trip(&out);
    assert_eq!(r.facets.len(), 13);
    assert_eq!(r.parents.len(), 12);
    assert_eq!(r.tower_hash, hash(2, 1));
    let cx = r.complex().unwrap();
    assert_eq!(&cx, Tower::build(&Complex::standard(2), 1).unwrap().final_complex());
    // every parent lies in the carrier's base simplex
    for (child, parent) in &r.parents {
        assert_eq!(child.color(), parent.color());
        assert!(parent.is_base());
    }

    let mid = dir.path().join("mid.json");
    let o = iis(&[
        "subdivide",
        "--iter",
        "2",
        "--stage",
        "2,2",
        "--out",
        mid.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r: SubdivisionReport = round_trip(&mid);
    assert_eq!(r.stage.map(|s| (s.k, s.d)), Some((2, 2)));
    assert_eq!(r.tower_hash, hash(2, 2));
}

#[test]
fn subdivide_rejects_an_unknown_stage() {
    let o = iis(&["subdivide", "--iter", "1", "--stage", "3,0"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn optimize_writes_a_table_that_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("table.json");
    let o = iis(&["optimize", "--task", "renaming", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    let table = SpecializationTable::from_json(&text).unwrap();
    assert_eq!(table.to_json(), text);
    assert_eq!(table.len(), 45);
    assert_eq!(table.tower_hash, hash(2, 2));
    assert!(text.contains(r#"[2,[2,2],{"pair":[2,[{"base":1},{"base":2}]]},{"decide":1}]"#));
}

#[test]
fn run_reports_the_worked_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let opt = dir.path().join("opt.json");
    let gen = dir.path().join("gen.json");
    let parts = ["--partition", "1,2;0", "--partition", "0,2;1"];
    let o = iis(&[
        &["run", "--protocol", "iis-opt", "--out", opt.to_str().unwrap()],
        &parts[..],
    ]
    .concat());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = iis(&[
        &["run", "--protocol", "iis", "--out", gen.to_str().unwrap()],
        &parts[..],
    ]
    .concat());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let opt: RunReport = round_trip(&opt);
    let gen: RunReport = round_trip(&gen);
    assert_eq!(opt.counters.process(2), (2, 6));
    assert_eq!(gen.counters.process(2), (4, 12));
    assert_eq!(opt.outputs[2], Some(OutputValue::Name(1)));
    assert_eq!(gen.outputs[2], Some(OutputValue::Name(1)));
    assert_eq!(opt.tower_hash, hash(2, 2));

    // the executed schedule replays strictly to the same trace
    let sched = dir.path().join("s.json");
    fs::write(&sched, gen.trace.schedule.to_json()).unwrap();
    let again = dir.path().join("again.json");
    let o = iis(&[
        "run",
        "--protocol",
        "iis",
        "--schedule",
        sched.to_str().unwrap(),
        "--out",
        again.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let again: RunReport = round_trip(&again);
    assert_eq!(again.trace, gen.trace);
}

#[test]
fn random_runs_are_deterministic() {
    let args = [
        "run",
        "--protocol",
        "iis",
        "--seed",
        "11",
        "--crash-probability",
        "0.3",
        "--random-reads",
    ];
    let a = iis(&args);
    let b = iis(&args);
    assert_eq!(code(&a), 0, "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let r: RunReport = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(r.final_vertices.len(), 3);
}

#[test]
fn enumerate_finds_the_three_edges_of_the_subdivided_edge() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e.json");
    let o = iis(&[
        "enumerate",
        "--n",
        "1",
        "--protocol",
        "is-prime",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r: EnumerationReport = round_trip(&out);
    assert!(r.valid);
    assert_eq!(r.outputs.len(), 3);
    assert!(r.outputs.iter().all(|e| e.simplex.len() == 2));

    let o = iis(&[
        "enumerate",
        "--n",
        "1",
        "--crashes",
        "--branch-reads",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r: EnumerationReport = round_trip(&out);
    // three edges, their four vertices and the empty output
    assert_eq!(r.outputs.len(), 8);
}

#[test]
fn compare_emits_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("savings.json");
    let csv = dir.path().join("savings.csv");
    let common = ["compare", "--task", "renaming", "--schedules", "40", "--seed", "3"];
    let o = iis(&[&common[..], &["--out", json.to_str().unwrap()]].concat());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r: SavingsReport = round_trip(&json);
    assert_eq!(r.runs.len(), 40);
    assert_eq!(r.tower_hash, hash(2, 2));
    assert!(r.all_dominated());
    assert!(r.optimized_ops < r.generic_ops);

    let o = iis(&[&common[..], &["--format", "csv", "--out", csv.to_str().unwrap()]].concat());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(&csv).unwrap();
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    let header = rows.headers().unwrap().clone();
    assert_eq!(&header[0], "schedule_id");
    assert_eq!(rows.records().count(), 40 * 3);
}

#[test]
fn delta_table_round_trips_and_checks() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("task.json");
    let o = iis(&["delta-table", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    let task = Task::from_json(&text).unwrap();
    assert_eq!(task.to_json(), text);
    assert_eq!(task.delta.len(), 99);
    assert_eq!(task.tower_hash, hash(2, 2));
}

#[test]
fn verify_passes_on_a_small_instance() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v.json");
    let o = iis(&[
        "verify",
        "--n",
        "1",
        "--iter",
        "1",
        "--samples",
        "200",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r: SuiteReport = round_trip(&out);
    assert!(r.passed());
    assert_eq!(r.tower_hash, hash(1, 1));
    assert!(r.check("optimizer-soundness").is_some());
}

#[test]
fn verify_rejects_a_corrupted_table_with_a_witness() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    let o = iis(&[
        "optimize",
        "--n",
        "1",
        "--iter",
        "1",
        "--task",
        "chromatic-agreement",
        "--out",
        good.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let mut table = SpecializationTable::from_json(&fs::read_to_string(&good).unwrap()).unwrap();
    // tell process 0, still holding its input, that it has already decided its input
    let (pid, stage, v, _) = table
        .entries()
        .find(|(p, s, v, _)| p.0 == 0 && s.k == 1 && s.d == 1 && v.is_base())
        .map(|(p, s, v, e)| (p, s, v.clone(), e.clone()))
        .unwrap();
    table.insert(pid, stage, v.clone(), TableEntry::Decide(OutputValue::Vertex(v)));
    let bad = dir.path().join("bad.json");
    fs::write(&bad, table.to_json()).unwrap();

    let out = dir.path().join("v.json");
    let o = iis(&[
        "verify",
        "--n",
        "1",
        "--iter",
        "1",
        "--samples",
        "200",
        "--table",
        bad.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    let r: SuiteReport = round_trip(&out);
    let sound = r.check("optimizer-soundness").unwrap();
    assert!(!sound.passed);
    let witness = sound
        .violation
        .as_ref()
        .and_then(|v| v.witness.as_ref())
        .expect("a witness schedule");
    assert!(!witness.steps.is_empty());
    assert!(stderr(&o).contains("FAIL optimizer-soundness"));
}

#[test]
fn configuration_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("t.json");
    assert_eq!(code(&iis(&["optimize", "--out", table.to_str().unwrap()])), 0);
    // a table for n = 2, K = 2 used on another tower
    let o = iis(&["verify", "--n", "1", "--iter", "1", "--table", table.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("different tower"));
    assert_eq!(code(&iis(&["verify", "--iter", "0"])), 2);
    assert_eq!(
        code(&iis(&["run", "--protocol", "iis", "--schedule", "/nonexistent/s.json"])),
        2
    );
    assert_eq!(code(&iis(&["run", "--protocol", "iis", "--partition", "0,0"])), 2);
    assert_eq!(code(&iis(&["run", "--protocol", "iis"])), 2);
    assert_eq!(code(&iis(&["optimize", "--task", "sorting"])), 2);
}

#[test]
fn output_directory_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_iis"))
        .args(["subdivide", "--n", "1", "--iter", "1"])
        .env("IIS_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let r: SubdivisionReport = round_trip(&dir.path().join("subdivision.json"));
    assert_eq!(r.facets.len(), 3);

    let o = Command::new(env!("CARGO_BIN_EXE_iis"))
        .args(["optimize", "--n", "1", "--iter", "1", "--out", "nested/t.json"])
        .env("IIS_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(dir.path().join("nested/t.json").exists());
}

#[test]
fn help_documents_every_command() {
    let o = iis(&["--help"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    for c in [
        "subdivide",
        "run",
        "enumerate",
        "optimize",
        "compare",
        "verify",
        "delta-table",
    ] {
        assert!(text.contains(c), "{c} missing from help");
    }
}
