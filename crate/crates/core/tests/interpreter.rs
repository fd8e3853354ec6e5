use proptest::prelude::*;
use taskviz_core::domain::Location;
use taskviz_core::sim::{default_map, execute, Arm, SimError, SimEvent, Status, TraceKind, DETECT_WINDOW};
use taskviz_core::task::{compile_task_steps, validate_robot_program, Action, Condition, RobotProgram};
use taskviz_core::{Interpreter, Map};
use taskviz_testkit::oracle::sufficient_events;
use taskviz_testkit::{gen, tasks};

fn map() -> Map {
    default_map()
}

fn detect_program() -> RobotProgram {
    RobotProgram::new(
        "hello",
        vec![
            Action::detect("seen"),
            Action::Branch {
                condition: Condition::IsTrue { var: "seen".into() },
                then_steps: vec![Action::say("Hi!")],
                else_steps: vec![Action::say("Nobody here.")],
            },
        ],
    )
}

fn detected(trace: &[taskviz_core::sim::TraceEntry]) -> (u64, bool) {
    trace
        .iter()
        .find_map(|e| match &e.kind {
            TraceKind::Detected { value, .. } => Some((e.t, *value)),
            _ => None,
        })
        .unwrap()
}

#[test]
fn detect_times_out_at_exactly_five_seconds() {
    let trace = execute(&detect_program(), &map(), &[SimEvent::wake("hello", 0)]).unwrap();
    assert_eq!(detected(&trace), (5_000_000, false));
    assert_eq!(DETECT_WINDOW, 5_000_000);
    assert!(trace.iter().any(|e| e.kind == TraceKind::BranchTaken { arm: Arm::Else }));
}

#[test]
fn detect_sees_a_person_at_their_arrival() {
    let events = [SimEvent::wake("hello", 0), SimEvent::human(3_200_000)];
    let trace = execute(&detect_program(), &map(), &events).unwrap();
    assert_eq!(detected(&trace), (3_200_000, true));
}

#[test]
fn detect_ignores_arrivals_after_the_window() {
    let events = [SimEvent::wake("hello", 0), SimEvent::human(5_000_001)];
    let trace = execute(&detect_program(), &map(), &events).unwrap();
    assert_eq!(detected(&trace), (5_000_000, false));
}

#[test]
fn detect_at_the_deadline_counts() {
    let events = [SimEvent::wake("hello", 0), SimEvent::human(5_000_000)];
    assert_eq!(detected(&execute(&detect_program(), &map(), &events).unwrap()), (5_000_000, true));
}

#[test]
fn goto_pantry_takes_six_seconds() {
    let p = RobotProgram::new("go", vec![Action::goto(Location::Pantry)]);
    let trace = execute(&p, &map(), &[SimEvent::wake("go", 0)]).unwrap();
    assert_eq!(trace[0].t, 6_000_000);
    assert_eq!(trace[0].kind, TraceKind::Arrived { location: Location::Pantry });
    assert_eq!(trace.last().unwrap().kind, TraceKind::Finished);
}

#[test]
fn somewhere_resolves_to_the_branch_place() {
    let file = tasks::H1;
    let program = compile_task_steps(&tasks::step_lines(file), None).unwrap();
    let events = [
        SimEvent::wake(program.wake.clone(), 0),
        SimEvent::reply("Ada", 0),
        SimEvent::reply("the meeting room please", 0),
    ];
    let trace = execute(&program, &map(), &events).unwrap();
    assert!(trace.iter().any(|e| e.kind == TraceKind::Arrived { location: Location::MeetingRoom }));
    assert!(trace.iter().any(|e| e.kind == TraceKind::Spoke { text: "Please follow me to the meeting room, Ada.".into() }));
}

#[test]
fn runtime_errors() {
    let p = RobotProgram::new("go", vec![Action::ask("Name?", "name")]);
    assert_eq!(execute(&p, &map(), &[]), Err(SimError::NoWake));
    assert_eq!(
        execute(&p, &map(), &[SimEvent::wake("go", 0)]),
        Err(SimError::EventsExhausted { var: "name".into() })
    );
    let mut interp = Interpreter::new(&p, map());
    interp.push(SimEvent::wake("go", 5)).unwrap();
    assert!(matches!(interp.push(SimEvent::reply("x", 4)), Err(SimError::NonMonotonicEvents { .. })));
}

#[test]
fn interactive_stepping_waits_for_input() {
    let p = RobotProgram::new("go", vec![Action::ask("Name?", "name"), Action::say("Hi {name}")]);
    let mut interp = Interpreter::new(&p, map());
    interp.run();
    assert_eq!(interp.status(), &Status::AwaitWake);
    interp.push(SimEvent::wake("GO ", 1_000)).unwrap();
    interp.run();
    assert!(matches!(interp.status(), Status::AwaitReply { .. }));
    interp.push(SimEvent::reply("Bo", 2_000)).unwrap();
    let new = interp.run();
    assert!(new.iter().any(|e| e.kind == TraceKind::Spoke { text: "Hi Bo".into() }));
    assert!(interp.is_done());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn valid_programs_always_finish(p in gen::valid_robot_program(8), replies in prop::collection::vec("[a-z ]{0,12}", 1..4)) {
        prop_assert_eq!(validate_robot_program(&p), vec![]);
        let replies: Vec<&str> = replies.iter().map(String::as_str).collect();
        let trace = execute(&p, &map(), &sufficient_events(&p, &replies));
        let trace = trace.map_err(|e| TestCaseError::fail(format!("{e:?}")))?;
        prop_assert_eq!(&trace.last().unwrap().kind, &TraceKind::Finished);
        prop_assert!(trace.windows(2).all(|w| w[0].t <= w[1].t));
    }

    #[test]
    fn static_errors_predict_runtime_errors(p in gen::robot_program(6)) {
        let events = sufficient_events(&p, &["yes"]);
        if let Err(SimError::UnboundVariable { .. } | SimError::IllegalTarget(_)) = execute(&p, &map(), &events) {
            prop_assert!(!validate_robot_program(&p).is_empty());
        }
    }

    #[test]
    fn execution_is_deterministic(p in gen::valid_robot_program(6), human in prop::option::of(0u64..8_000_000)) {
        let mut events = sufficient_events(&p, &["yes", "no"]);
        if let Some(t) = human {
            events.push(SimEvent::human(t));
        }
        prop_assert_eq!(execute(&p, &map(), &events), execute(&p, &map(), &events));
    }
}
