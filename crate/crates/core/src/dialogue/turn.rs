//! Applying one turn to a session: consistency checks, state updates and
//! effects. Everything here is pure so a recorded turn replays exactly.

use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{DialoguePhase, DrawConfig, DrawMode, DrawProgram, OutputState, RobotOutput, SequenceItem};
use crate::draw::{
    apply_draw_rules, compile_frames, parse_draw_script, synthesize_drawing, validate_program, FrameList, FrameTiming,
};
use crate::task::{compile_task_steps, parse_step, Action, RobotProgram};

use super::intent::{classify_intent, IntentClass};
use super::output::{parse_reply, ProviderReply};
use super::session::{HistoryEntry, SessionState, Speaker};

/// A session stops calling the provider after this many user turns.
pub const MAX_TURNS: usize = 50;

pub const REPEAT_PROMPT: &str = "Sorry, I did not catch that. Could you say it again?";
pub const TURN_LIMIT_PROMPT: &str = "This session has reached its turn limit. Please start a new session.";
pub const CONFIRM_SPEAK: &str = "Thank you for confirming. I will now generate the program for this task.";

/// Something the session asks the outside world to do.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Effect {
    Speak {
        text: String,
    },
    Draw {
        mode: DrawMode,
        program: DrawProgram,
        config: DrawConfig,
        frames: FrameList<f64>,
    },
    /// The drawing could not be presented.
    DrawFailed {
        reason: String,
    },
    CompileProgram {
        program: RobotProgram,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum TurnInput {
    Utterance { text: String },
    /// The user pressed the confirm control.
    Confirm,
}

/// One provider call: its raw response or the failure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attempt {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Everything needed to replay a turn without the provider.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TurnRecord {
    pub at: u64,
    pub input: TurnInput,
    #[serde(default)]
    pub attempts: Vec<Attempt>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TurnError {
    #[error("{intent} is not allowed in phase {phase}")]
    IllegalTransition { intent: IntentClass, phase: DialoguePhase },
    #[error("phase {0} does not accept utterances")]
    BadPhase(DialoguePhase),
    #[error("inconsistent output: {0}")]
    Inconsistent(String),
    #[error("invalid output: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TurnOutcome {
    pub state: SessionState,
    pub effects: Vec<Effect>,
    pub intent: IntentClass,
    /// Index of the attempt whose output was used.
    pub accepted: Option<usize>,
}

/// A wake keyword stated in an utterance, e.g. `the keyword is "patrol"`.
pub fn wake_word_in(utterance: &str) -> Option<String> {
    static RX: OnceLock<Regex> = OnceLock::new();
    let rx = RX.get_or_init(|| {
        Regex::new(r#"(?i)(?:keyword|wake ?word|activation word)\s*(?:is|to|as|be|should be|:)?\s*["'“‘]([^"'”’]+)["'”’]"#)
            .expect("static pattern")
    });
    rx.captures(utterance).map(|c| c[1].trim().to_string()).filter(|w| !w.is_empty())
}

fn wake_in_steps(steps: &[String]) -> Option<String> {
    steps.iter().find_map(|s| match parse_step(s) {
        Ok(Action::Wake { keyword }) => Some(keyword),
        _ => None,
    })
}

/// The wake word known after this turn.
fn effective_wake(state: &SessionState, utterance: Option<&str>, reply: &ProviderReply, steps: &[String]) -> Option<String> {
    reply
        .wake_word
        .clone()
        .or_else(|| utterance.and_then(wake_word_in))
        .or_else(|| wake_in_steps(steps))
        .or_else(|| state.wake_word.clone())
}

pub fn sequence_from_steps(steps: &[String]) -> Vec<SequenceItem> {
    steps
        .iter()
        .enumerate()
        .map(|(i, s)| SequenceItem::new((i + 1).to_string(), s.clone()))
        .collect()
}

/// The intent a reply is held to: the provider's own when given.
fn resolve_intent(classified: IntentClass, reply: &ProviderReply) -> IntentClass {
    reply.intent.unwrap_or(classified)
}

/// Checks that a reply fits the intent and the session:
/// modify draws feedback and changes the task; unrelated and inquire draw
/// nothing; a completion presents the task once a wake word is known;
/// acceptance is only possible right after a presentation.
pub fn check_reply(
    state: &SessionState,
    intent: IntentClass,
    utterance: Option<&str>,
    reply: &ProviderReply,
) -> Result<(), TurnError> {
    let out = &reply.output;
    let phase = state.phase;
    if intent == IntentClass::FinalConfirm && phase != DialoguePhase::ConfirmPending {
        return Err(TurnError::IllegalTransition { intent, phase });
    }
    if phase == DialoguePhase::Deployed
        && !matches!(intent, IntentClass::Modify | IntentClass::Inquire | IntentClass::Unrelated)
    {
        return Err(TurnError::IllegalTransition { intent, phase });
    }
    let inconsistent = |why: String| Err(TurnError::Inconsistent(why));
    if (out.state == OutputState::Confirmed) != (intent == IntentClass::FinalConfirm) {
        return inconsistent(format!("state {} does not fit intent {intent}", out.state));
    }
    let expected = match intent {
        IntentClass::Modify => {
            if out.task == state.task_steps {
                return inconsistent("modify left the task unchanged".into());
            }
            DrawMode::Feedback
        }
        IntentClass::Unrelated | IntentClass::Inquire | IntentClass::FinalConfirm => DrawMode::None,
        IntentClass::Complete | IntentClass::ConfirmRequest => {
            let ready = !state.task_steps.is_empty() && effective_wake(state, utterance, reply, &state.task_steps).is_some();
            if ready {
                DrawMode::Confirm
            } else {
                DrawMode::None
            }
        }
    };
    if out.draw != expected {
        return inconsistent(format!("intent {intent} needs draw {expected}, got {}", out.draw));
    }
    Ok(())
}

/// A usable candidate drawing: the provider's script when it parses and
/// validates, otherwise one synthesized from the task steps.
fn candidate(reply: &ProviderReply, steps: &[String], mode: DrawMode) -> (DrawProgram, DrawConfig) {
    let parsed = reply
        .draw_script
        .as_deref()
        .and_then(|s| parse_draw_script(s).ok())
        .filter(|p| !p.is_empty() && validate_program(p).is_empty());
    match parsed {
        Some(program) => {
            let sequence = match &reply.draw_config {
                Some(c) if !c.sequence.is_empty() => c.sequence.clone(),
                _ => sequence_from_steps(steps),
            };
            (program, DrawConfig::new(mode, sequence))
        }
        None => synthesize_drawing(steps, mode),
    }
}

fn present(state: &mut SessionState, reply: &ProviderReply, mode: DrawMode, timing: &FrameTiming) -> Effect {
    let (program, config) = candidate(reply, &state.task_steps, mode);
    let last = state.last_draw_program.as_ref().zip(state.last_draw_config.as_ref());
    let ruled = apply_draw_rules(mode, last, (&program, &config));
    match compile_frames::<f64>(&ruled.program, &ruled.config, timing) {
        Ok(frames) => {
            state.last_draw_program = Some(ruled.program.clone());
            state.last_draw_config = Some(ruled.config.clone());
            Effect::Draw {
                mode,
                program: ruled.program,
                config: ruled.config,
                frames,
            }
        }
        Err(e) => Effect::DrawFailed { reason: e.to_string() },
    }
}

/// Applies a checked reply. Effects always open with exactly one `Speak`.
pub fn apply_turn(
    state: &SessionState,
    intent: IntentClass,
    utterance: Option<&str>,
    reply: &ProviderReply,
    at: u64,
    timing: &FrameTiming,
) -> Result<(SessionState, Vec<Effect>), TurnError> {
    check_reply(state, intent, utterance, reply)?;
    let out: &RobotOutput = &reply.output;
    let mut next = state.clone();
    let mut speak = out.speak.clone();
    let mut extra = Vec::new();
    match intent {
        IntentClass::Unrelated | IntentClass::Inquire => {}
        IntentClass::Modify => {
            next.task_steps = out.task.clone();
            next.wake_word = effective_wake(state, utterance, reply, &next.task_steps);
            if next.phase != DialoguePhase::Communicating {
                next.phase = DialoguePhase::Communicating;
                next.program = None;
            }
            extra.push(present(&mut next, reply, DrawMode::Feedback, timing));
        }
        IntentClass::Complete | IntentClass::ConfirmRequest => {
            next.wake_word = effective_wake(state, utterance, reply, &next.task_steps);
            if out.draw == DrawMode::Confirm {
                next.phase = DialoguePhase::ConfirmPending;
                extra.push(present(&mut next, reply, DrawMode::Confirm, timing));
            }
        }
        IntentClass::FinalConfirm => {
            let compiled = match &reply.program {
                Some(p) => crate::task::compile_flow(&p.body, &p.wake),
                None => compile_task_steps(&next.task_steps, next.wake_word.as_deref()),
            };
            match compiled {
                Ok(program) => {
                    next.phase = DialoguePhase::Confirmed;
                    next.program = Some(program.clone());
                    extra.push(Effect::CompileProgram { program });
                }
                Err(e) => {
                    next.phase = DialoguePhase::Communicating;
                    speak = format!("{speak} However, the program could not be generated: {e}. Please adjust the task.");
                }
            }
        }
    }
    next.history.push(HistoryEntry {
        speaker: Speaker::Robot,
        text: speak.clone(),
        at,
    });
    let mut effects = vec![Effect::Speak { text: speak }];
    effects.extend(extra);
    Ok((next, effects))
}

fn confirm_reply(state: &SessionState) -> ProviderReply {
    ProviderReply {
        output: RobotOutput {
            speak: CONFIRM_SPEAK.into(),
            state: OutputState::Confirmed,
            draw: DrawMode::None,
            task: state.task_steps.clone(),
        },
        intent: Some(IntentClass::FinalConfirm),
        draw_script: None,
        draw_config: None,
        wake_word: None,
        program: None,
    }
}

/// Computes the result of a recorded turn. The first attempt whose output
/// parses, fits the intent and applies cleanly is used. When none does,
/// the session is unchanged and the robot asks the user to repeat.
pub fn settle_turn(state: &SessionState, record: &TurnRecord, timing: &FrameTiming) -> Result<TurnOutcome, TurnError> {
    if !state.phase.accepts_utterances() {
        return Err(TurnError::BadPhase(state.phase));
    }
    let mut with_user = state.clone();
    match &record.input {
        TurnInput::Confirm => {
            if state.phase != DialoguePhase::ConfirmPending {
                return Err(TurnError::IllegalTransition {
                    intent: IntentClass::FinalConfirm,
                    phase: state.phase,
                });
            }
            with_user.history.push(HistoryEntry {
                speaker: Speaker::User,
                text: "confirm".into(),
                at: record.at,
            });
            let (state, effects) =
                apply_turn(&with_user, IntentClass::FinalConfirm, None, &confirm_reply(state), record.at, timing)?;
            Ok(TurnOutcome {
                state,
                effects,
                intent: IntentClass::FinalConfirm,
                accepted: None,
            })
        }
        TurnInput::Utterance { text } => {
            let classified = classify_intent(text, state.phase);
            let unchanged = |speak: &str| TurnOutcome {
                state: state.clone(),
                effects: vec![Effect::Speak { text: speak.into() }],
                intent: classified,
                accepted: None,
            };
            if state.user_turns() >= MAX_TURNS {
                return Ok(unchanged(TURN_LIMIT_PROMPT));
            }
            with_user.history.push(HistoryEntry {
                speaker: Speaker::User,
                text: text.clone(),
                at: record.at,
            });
            for (i, attempt) in record.attempts.iter().enumerate() {
                if let Ok((intent, next, effects)) = try_attempt(&with_user, classified, text, attempt, record.at, timing) {
                    return Ok(TurnOutcome {
                        state: next,
                        effects,
                        intent,
                        accepted: Some(i),
                    });
                }
            }
            Ok(unchanged(REPEAT_PROMPT))
        }
    }
}

type Applied = (IntentClass, SessionState, Vec<Effect>);

/// Evaluates one provider attempt against a state that already holds the
/// user's utterance.
pub fn try_attempt(
    state: &SessionState,
    classified: IntentClass,
    utterance: &str,
    attempt: &Attempt,
    at: u64,
    timing: &FrameTiming,
) -> Result<Applied, TurnError> {
    let raw = attempt
        .raw
        .as_deref()
        .ok_or_else(|| TurnError::Invalid(attempt.error.clone().unwrap_or_default()))?;
    let reply = parse_reply(raw).map_err(|errs| {
        TurnError::Invalid(errs.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))
    })?;
    let intent = resolve_intent(classified, &reply);
    let (next, effects) = apply_turn(state, intent, Some(utterance), &reply, at, timing)?;
    Ok((intent, next, effects))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wake_phrases() {
        assert_eq!(wake_word_in("The keyword is 'visitor reception'"), Some("visitor reception".into()));
        assert_eq!(wake_word_in("use the wake word \"patrol\" please"), Some("patrol".into()));
        assert_eq!(wake_word_in("no keyword here"), None);
    }
}
