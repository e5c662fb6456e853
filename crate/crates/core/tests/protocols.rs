use iis_core::optimizer::{specialize, DescendantIndex};
use iis_core::protocols::{
    standard_inputs, step_is, step_is_prime, IteratedScan, ObliviousScan, SpecializedScan, WriteScan,
};
use iis_core::simulator::{
    run_protocol, targeted_schedule, Action, OrderedPartition, Outcome, Program, Replay, Scheduler, SharedMemory,
};
use iis_core::tasks::{OutputValue, Task};
use iis_core::verify::solo_schedule;
use iis_core::{Color, Complex, Label, StageId, Tower};

fn pair(i: usize, view: &[usize]) -> Label {
    Label::pair(i, view.iter().map(|&j| Label::base(j))).unwrap()
}

fn scripted<P: Program>(program: &P, partitions: &[&str]) -> iis_core::simulator::ExecutionTrace {
    let parts: Vec<OrderedPartition> = partitions.iter().map(|p| OrderedPartition::parse(p).unwrap()).collect();
    let s = targeted_schedule(program.n(), &parts).unwrap();
    run_protocol(
        program,
        &standard_inputs(program.n()),
        &Scheduler::Scripted(s),
        Replay::Strict,
    )
    .unwrap()
}

#[test]
fn solo_oblivious_scan_at_n1_costs_two_writes_and_four_reads() {
    let p = ObliviousScan { n: 1 };
    let t = run_protocol(
        &p,
        &standard_inputs(1),
        &Scheduler::Scripted(solo_schedule(1, 0, p.max_actions())),
        Replay::Strict,
    )
    .unwrap();
    assert_eq!(t.counters.process(0), (2, 4));
    assert_eq!(t.final_vertices()[0], Some(pair(0, &[0])));
    assert!(matches!(t.outcomes[1], Outcome::Crashed { at_step: 0 }));
}

#[test]
fn lock_step_gives_the_central_facet() {
    let t = scripted(&ObliviousScan { n: 2 }, &["0,1,2"]);
    let central: Vec<Option<Label>> = (0..3).map(|i| Some(pair(i, &[0, 1, 2]))).collect();
    assert_eq!(t.final_vertices(), central);
    assert_eq!(t.counters.total_writes, 3);
    assert_eq!(t.counters.total_reads, 9);
}

#[test]
fn sequential_order_gives_a_chain_of_views() {
    for program in [&ObliviousScan { n: 2 } as &dyn Program, &WriteScan { n: 2 }] {
        let parts = [OrderedPartition::parse("0;1;2").unwrap()];
        let s = targeted_schedule(2, &parts).unwrap();
        let t = run_protocol(program, &standard_inputs(2), &Scheduler::Scripted(s), Replay::Strict).unwrap();
        assert_eq!(
            t.final_vertices(),
            vec![Some(pair(0, &[0])), Some(pair(1, &[0, 1])), Some(pair(2, &[0, 1, 2]))]
        );
        // the first process runs every round, the last returns in the first
        assert_eq!(t.counters.process(0), (3, 9));
        assert_eq!(t.counters.process(2), (1, 3));
    }
}

#[test]
fn oblivious_scan_keeps_the_own_value_on_a_short_view() {
    let p = ObliviousScan { n: 2 };
    let mut mem = SharedMemory::new(2);
    let st = p.start(Color(1), Label::base(1)).unwrap();
    let (st, action) = step_is_prime(&st, &mem, None).unwrap();
    let Action::Write { value, .. } = &action else {
        panic!("expected a write, got {action:?}")
    };
    mem.write(StageId::new(1, 2), Color(1), value.clone()).unwrap();
    let mut st = st;
    for cell in 0..3 {
        st = step_is_prime(&st, &mem, Some(cell)).unwrap().0;
    }
    // view {1} at d = 2 is too small: the process moves down a round with its value unchanged
    assert_eq!((st.k, st.d, st.v.clone()), (1, 1, Label::base(1)));
    assert!(!st.is_decided());

    let ws = WriteScan { n: 2 };
    let mut st = ws.start(Color(1), Label::base(1)).unwrap();
    st = step_is(&st, &mem, None).unwrap().0;
    for cell in 0..3 {
        st = step_is(&st, &mem, Some(cell)).unwrap().0;
    }
    assert_eq!((st.k, st.d), (1, 1));
}

#[test]
fn iterated_scan_applies_the_decision_map() {
    let tower = Tower::build(&Complex::standard(2), 2).unwrap();
    let task = Task::renaming(&tower).unwrap();
    let program = IteratedScan {
        n: 2,
        iterations: 2,
        decision: &task.delta,
    };
    let t = scripted(&program, &["0,1,2", "0,1,2"]);
    for (p, o) in t.outcomes.iter().enumerate() {
        let Outcome::Returned { output, vertex } = o else {
            panic!("process {p} did not return")
        };
        assert_eq!(task.delta.get(vertex).unwrap(), output);
    }
    let names: std::collections::BTreeSet<_> = t.outcomes.iter().filter_map(Outcome::output).collect();
    assert_eq!(names.len(), 3);
}

#[test]
fn specialized_scan_returns_early_along_the_worked_schedule() {
    let tower = Tower::build(&Complex::standard(2), 2).unwrap();
    let task = Task::renaming(&tower).unwrap();
    let idx = DescendantIndex::build(&tower).unwrap();
    let table = specialize(&task, &tower, &idx).unwrap();
    let generic = IteratedScan {
        n: 2,
        iterations: 2,
        decision: &task.delta,
    };
    let special = SpecializedScan {
        n: 2,
        iterations: 2,
        decision: &task.delta,
        table: &table,
    };
    let g = scripted(&generic, &["1,2;0", "0,2;1"]);
    let parts = [
        OrderedPartition::parse("1,2;0").unwrap(),
        OrderedPartition::parse("0,2;1").unwrap(),
    ];
    let s = targeted_schedule(2, &parts).unwrap();
    let o = run_protocol(&special, &standard_inputs(2), &Scheduler::Scripted(s), Replay::Project).unwrap();
    assert_eq!(g.counters.process(2), (4, 12));
    assert_eq!(o.counters.process(2), (2, 6));
    assert_eq!(o.outcomes[2].output(), Some(&OutputValue::Name(1)));
    assert_eq!(g.outcomes[2].output(), Some(&OutputValue::Name(1)));
}

#[test]
fn out_of_range_process_is_rejected() {
    assert!(ObliviousScan { n: 1 }.start(Color(2), Label::base(2)).is_err());
}
