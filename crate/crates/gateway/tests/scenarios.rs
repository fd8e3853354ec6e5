use std::path::Path;

use serde_json::json;
use taskviz_core::domain::DialoguePhase;
use taskviz_core::draw::FrameTiming;
use taskviz_core::sim::default_map;
use taskviz_gateway::log::{log_path, parse_log, replay_file, snapshot_path, LogEntry, LogError, SessionRecord};
use taskviz_gateway::runner::{run_scenario, scenario_hub, to_jsonl};
use taskviz_gateway::wire::{output_rank, StatePayload};
use taskviz_gateway::{bundled, parse_scenario, MessageType, Scenario, WireMessage};

fn scenarios() -> Vec<Scenario> {
    bundled::ALL.iter().map(|(_, src)| parse_scenario(src).unwrap()).collect()
}

async fn run(scenario: &Scenario, dir: Option<&Path>) -> Vec<WireMessage> {
    let hub = scenario_hub(scenario, default_map(), dir.map(Path::to_path_buf));
    run_scenario(&hub, scenario).await
}

fn final_phase(stream: &[WireMessage]) -> DialoguePhase {
    let last = stream.iter().rev().find(|m| m.kind == MessageType::State).unwrap();
    last.payload::<StatePayload>().unwrap().phase
}

#[tokio::test]
async fn bundled_scenarios_finish_deployed_without_errors() {
    for s in scenarios() {
        let stream = run(&s, None).await;
        let errors: Vec<_> = stream.iter().filter(|m| m.kind == MessageType::Error).collect();
        assert!(errors.is_empty(), "{}: {errors:?}", s.name);
        assert_eq!(final_phase(&stream), DialoguePhase::Deployed, "{}", s.name);
        assert!(stream.iter().any(|m| m.kind == MessageType::Program), "{}", s.name);
        assert!(stream.iter().any(|m| m.kind == MessageType::TraceEntry), "{}", s.name);
        let finished = stream
            .iter()
            .filter(|m| m.kind == MessageType::TraceEntry)
            .any(|m| m.payload["kind"] == "finished");
        assert!(finished, "{}: the test run did not finish", s.name);
    }
}

#[tokio::test]
async fn runs_are_byte_identical() {
    for s in scenarios() {
        let first = to_jsonl(&run(&s, None).await);
        for _ in 0..3 {
            assert_eq!(to_jsonl(&run(&s, None).await), first, "{}", s.name);
        }
    }
}

#[tokio::test]
async fn every_response_leads_with_state_and_is_ordered() {
    for s in scenarios() {
        let hub = scenario_hub(&s, default_map(), None);
        let mut out_seq = 0;
        for message in s.client_messages() {
            let batch = hub.request(message).await;
            assert_eq!(batch[0].kind, MessageType::State, "{}", s.name);
            assert!(batch.windows(2).all(|w| output_rank(w[0].kind) <= output_rank(w[1].kind)));
            for m in &batch {
                out_seq += 1;
                assert_eq!(m.seq, out_seq, "server seq is contiguous");
            }
        }
    }
}

#[tokio::test]
async fn visitor_reception_follows_the_expected_flow() {
    let s = parse_scenario(bundled::VISITOR_RECEPTION).unwrap();
    let stream = run(&s, None).await;
    let draws: Vec<String> = stream
        .iter()
        .filter(|m| m.kind == MessageType::Draw)
        .map(|m| m.payload["mode"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(draws, ["feedback", "feedback", "feedback", "confirm"]);
    let phases: Vec<DialoguePhase> = stream
        .iter()
        .filter(|m| m.kind == MessageType::State)
        .map(|m| m.payload::<StatePayload>().unwrap().phase)
        .collect();
    use DialoguePhase::*;
    let mut distinct = phases.clone();
    distinct.dedup();
    assert_eq!(distinct, [Communicating, ConfirmPending, Confirmed, Deployed, Testing, Deployed]);
    let arrivals: Vec<&str> = stream
        .iter()
        .filter(|m| m.payload["kind"] == "arrived")
        .map(|m| m.payload["location"].as_str().unwrap())
        .collect();
    assert_eq!(arrivals, ["ReceptionArea", "MeetingRoom", "ReceptionArea"]);
}

#[tokio::test]
async fn persisted_logs_replay_to_the_snapshot() {
    for s in scenarios() {
        let dir = tempfile::tempdir().unwrap();
        run(&s, Some(dir.path())).await;
        let session = replay_file(&log_path(dir.path(), &s.session), default_map(), FrameTiming::default()).unwrap();
        let snapshot: SessionRecord =
            serde_json::from_slice(&std::fs::read(snapshot_path(dir.path(), &s.session)).unwrap()).unwrap();
        assert_eq!(snapshot.id, s.session);
        assert_eq!(session.state, snapshot.state, "{}", s.name);
        assert_eq!(session.phase(), DialoguePhase::Deployed);
    }
}

#[tokio::test]
async fn logs_record_every_exchange() {
    let s = parse_scenario(bundled::EMPLOYEE_GATHERING).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let stream = run(&s, Some(dir.path())).await;
    let entries = parse_log(&std::fs::read(log_path(dir.path(), &s.session)).unwrap()).unwrap();
    assert!(matches!(&entries[0], LogEntry::Open { session, .. } if *session == s.session));
    let logged_out: Vec<WireMessage> = entries
        .iter()
        .filter_map(|e| match e {
            LogEntry::Out { message } => Some(message.clone()),
            _ => None,
        })
        .collect();
    assert_eq!(logged_out, stream);
    let ins = entries.iter().filter(|e| matches!(e, LogEntry::In { .. })).count();
    assert_eq!(ins, s.client_messages().len());
    // The retried turn keeps both provider attempts.
    let attempts: Vec<usize> = entries
        .iter()
        .filter_map(|e| match e {
            LogEntry::Turn { record } => Some(record.attempts.len()),
            _ => None,
        })
        .collect();
    assert!(attempts.contains(&2), "{attempts:?}");
}

fn long_scenario(turns: usize) -> String {
    let stops = ["Pantry", "Meeting room", "Reception area", "Creation studio", "Employee office area"];
    let mut src = String::from("name = \"long\"\n");
    let mut steps: Vec<String> = vec!["start with keyword long walk".into()];
    for i in 0..turns {
        let stop = stops[i % stops.len()];
        steps.push(format!("go to {stop}"));
        src.push_str(&format!(
            "\n[[step]]\nutterance = \"Then go to the {}.\"\n[step.reply]\nspeak = \"Added stop {}.\"\nstate = \"communicating\"\ndraw = \"feedback\"\ntask = {}\n",
            stop.to_lowercase(),
            i + 1,
            serde_json::to_string(&steps).unwrap()
        ));
    }
    src
}

#[tokio::test]
async fn twelve_turn_session_survives_a_restart() {
    let full = parse_scenario(&long_scenario(13)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let messages = full.client_messages();
    {
        let hub = scenario_hub(&full, default_map(), Some(dir.path().to_path_buf()));
        for m in &messages[..13] {
            let batch = hub.request(m.clone()).await;
            assert!(batch.iter().all(|m| m.kind != MessageType::Error), "{batch:?}");
        }
    }
    let record: SessionRecord =
        serde_json::from_slice(&std::fs::read(snapshot_path(dir.path(), "long")).unwrap()).unwrap();
    assert_eq!(record.state.user_turns(), 12);
    assert_eq!(record.state.task_steps.len(), 13);

    // A new process restores the session from its log and carries on where
    // the provider script left off.
    let hub = scenario_hub(&full, default_map(), Some(dir.path().to_path_buf()));
    let restored = hub
        .request(WireMessage::new(MessageType::Replay, "long", 100, json!({})))
        .await;
    assert_eq!(restored.len(), 1);
    let state: StatePayload = restored[0].payload().unwrap();
    assert_eq!(state.task_steps, record.state.task_steps);
    let mut last = messages[13].clone();
    last.seq = 101;
    let batch = hub.request(last).await;
    assert!(batch.iter().all(|m| m.kind != MessageType::Error), "{batch:?}");
    let state: StatePayload = batch[0].payload().unwrap();
    assert_eq!(state.task_steps.len(), 14);

    let session = replay_file(&log_path(dir.path(), "long"), default_map(), FrameTiming::default()).unwrap();
    assert_eq!(session.state.user_turns(), 13);
}

#[tokio::test]
async fn replaying_an_open_session_is_refused() {
    let s = parse_scenario(bundled::OFFICE_PATROL).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let hub = scenario_hub(&s, default_map(), Some(dir.path().to_path_buf()));
    hub.request(s.client_messages()[0].clone()).await;
    let out = hub.request(WireMessage::new(MessageType::Replay, &s.session, 5, json!({}))).await;
    assert_eq!(out[0].payload["code"], "sessionExists");
    let out = hub.request(WireMessage::new(MessageType::Replay, "nobody", 1, json!({}))).await;
    assert_eq!(out[0].payload["code"], "unknownSession");
    let hub = scenario_hub(&s, default_map(), None);
    let out = hub.request(WireMessage::new(MessageType::Replay, "x", 1, json!({}))).await;
    assert_eq!(out[0].payload["code"], "replayFailed");
}

#[tokio::test]
async fn truncated_and_tampered_logs_are_rejected() {
    let s = parse_scenario(bundled::VISITOR_RECEPTION).unwrap();
    let dir = tempfile::tempdir().unwrap();
    run(&s, Some(dir.path())).await;
    let path = log_path(dir.path(), &s.session);
    let bytes = std::fs::read(&path).unwrap();

    let cut = &bytes[..bytes.len() - 10];
    let last_record = bytes[..bytes.len() - 1].iter().rposition(|b| *b == b'\n').unwrap() + 1;
    match parse_log(cut) {
        Err(LogError::CorruptLog { offset, .. }) => assert_eq!(offset, last_record),
        other => panic!("{other:?}"),
    }
    std::fs::write(&path, cut).unwrap();
    assert!(matches!(
        replay_file(&path, default_map(), FrameTiming::default()),
        Err(LogError::CorruptLog { .. })
    ));
    let hub = scenario_hub(&s, default_map(), Some(dir.path().to_path_buf()));
    let out = hub.request(WireMessage::new(MessageType::Replay, &s.session, 1, json!({}))).await;
    assert_eq!(out[0].payload["code"], "replayFailed");

    let text = String::from_utf8(bytes).unwrap();
    let tampered = text.replacen("Welcome to our company.", "Welcome to our office.", 1);
    assert_ne!(tampered, text);
    std::fs::write(&path, tampered).unwrap();
    assert!(matches!(
        replay_file(&path, default_map(), FrameTiming::default()),
        Err(LogError::Diverged { .. })
    ));
}

#[tokio::test]
async fn sessions_are_isolated() {
    let s = parse_scenario(bundled::OFFICE_PATROL).unwrap();
    let hub = scenario_hub(&s, default_map(), None);
    let a = hub.request(WireMessage::new(MessageType::NewSession, "", 1, json!({}))).await;
    let b = hub.request(WireMessage::new(MessageType::NewSession, "", 1, json!({}))).await;
    assert_eq!(a[0].session, "session-1");
    assert_eq!(b[0].session, "session-2");
    assert_eq!(hub.session_ids(), ["session-1", "session-2"]);
    let first = &s.client_messages()[1];
    for id in ["session-1", "session-2"] {
        let mut m = first.clone();
        m.session = id.into();
        let out = hub.request(m).await;
        let state: StatePayload = out[0].payload().unwrap();
        assert_eq!(state.task_steps.len(), 3, "each session gets its own script");
    }
}
