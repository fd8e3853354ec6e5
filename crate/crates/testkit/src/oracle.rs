//! Independent reference implementations used to check the real ones.

use std::collections::BTreeSet;

use taskviz_core::domain::{DrawCommand, DrawProgram, FeedbackType};
use taskviz_core::sim::SimEvent;
use taskviz_core::task::{Action, RobotProgram};

/// Identity of an element as a plain tuple of strings, built without
/// going through the engine's key type.
pub fn raw_key(cmd: &DrawCommand) -> (String, String, String, String) {
    match cmd {
        DrawCommand::Mark(m) => ("mark".into(), m.location.as_str().into(), m.content.to_string(), String::new()),
        DrawCommand::Link(l) => ("link".into(), l.from.as_str().into(), l.to.as_str().into(), l.label.clone()),
    }
}

fn annotated(cmd: &DrawCommand, feedback: FeedbackType) -> DrawCommand {
    let mut c = cmd.clone();
    match &mut c {
        DrawCommand::Mark(m) => m.feedback = feedback,
        DrawCommand::Link(l) => l.feedback = feedback,
    }
    c
}

/// Brute-force diff over key sets: kept keys in old order with the new
/// attributes, then removed keys, then added keys.
pub fn diff_oracle(old: &DrawProgram, new: &DrawProgram) -> DrawProgram {
    let old_keys: BTreeSet<_> = old.iter().map(raw_key).collect();
    let new_keys: BTreeSet<_> = new.iter().map(raw_key).collect();
    let kept: BTreeSet<_> = old_keys.intersection(&new_keys).cloned().collect();
    let removed: BTreeSet<_> = old_keys.difference(&new_keys).cloned().collect();
    let added: BTreeSet<_> = new_keys.difference(&old_keys).cloned().collect();

    let mut out = Vec::new();
    for o in old.iter().filter(|c| kept.contains(&raw_key(c))) {
        let k = raw_key(o);
        let n = new.iter().find(|c| raw_key(c) == k).unwrap();
        out.push(annotated(n, FeedbackType::None));
    }
    for o in old.iter().filter(|c| removed.contains(&raw_key(c))) {
        out.push(annotated(o, FeedbackType::Del));
    }
    for n in new.iter().filter(|c| added.contains(&raw_key(c))) {
        out.push(annotated(n, FeedbackType::Add));
    }
    DrawProgram::new(out)
}

/// Expected fade-in opacity at tick `k` of `ticks`.
pub fn ramp(k: u32, ticks: u32) -> f64 {
    k as f64 / ticks as f64
}

fn count_asks(actions: &[Action]) -> usize {
    actions
        .iter()
        .map(|a| match a {
            Action::Ask { .. } => 1,
            Action::Branch {
                then_steps, else_steps, ..
            } => count_asks(then_steps) + count_asks(else_steps),
            _ => 0,
        })
        .sum()
}

/// The wake word at t=0 followed by one queued reply per question in the
/// program, cycling through `replies`. Enough for any path to finish.
pub fn sufficient_events(program: &RobotProgram, replies: &[&str]) -> Vec<SimEvent> {
    let mut events = vec![SimEvent::wake(program.wake.clone(), 0)];
    let fallback = ["yes"];
    let replies = if replies.is_empty() { &fallback[..] } else { replies };
    for i in 0..count_asks(&program.body) {
        events.push(SimEvent::reply(replies[i % replies.len()], 0));
    }
    events
}
