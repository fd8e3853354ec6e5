//! Validation of raw provider responses.

use serde_json::{Map, Value};
use thiserror::Error;

use crate::domain::{DrawConfig, DrawMode, OutputState, RobotOutput};
use crate::task::{parse_ir, IrSyntaxError, RobotProgram};

use super::intent::IntentClass;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OutputError {
    #[error("response is not JSON: {0}")]
    NotJson(String),
    #[error("response is not a JSON object")]
    NotObject,
    #[error("missing field `{0}`")]
    MissingField(&'static str),
    #[error("field `{field}` should be {expected}")]
    BadType { field: &'static str, expected: &'static str },
    #[error("field `{field}` has invalid value `{value}`")]
    BadEnum { field: &'static str, value: String },
    #[error("task step {0} is empty")]
    EmptyTaskStep(usize),
    #[error("drawConfig is malformed: {0}")]
    BadDrawConfig(String),
    #[error("program: {0}")]
    BadProgram(IrSyntaxError),
}

/// Everything a provider may return for one turn. Only the four output
/// fields are required.
#[derive(Debug, Clone, PartialEq)]
pub struct ProviderReply {
    pub output: RobotOutput,
    /// The provider's own reading of the utterance, overriding the rules.
    pub intent: Option<IntentClass>,
    /// Draw script text; parsed later, with a synthesized fallback.
    pub draw_script: Option<String>,
    pub draw_config: Option<DrawConfig>,
    pub wake_word: Option<String>,
    pub program: Option<RobotProgram>,
}

fn field<'a>(obj: &'a Map<String, Value>, names: &[&str]) -> Option<&'a Value> {
    names.iter().find_map(|n| obj.get(*n)).filter(|v| !v.is_null())
}

fn text_field(
    obj: &Map<String, Value>,
    name: &'static str,
    aliases: &[&str],
    errors: &mut Vec<OutputError>,
) -> Option<String> {
    let names: Vec<&str> = std::iter::once(name).chain(aliases.iter().copied()).collect();
    match field(obj, &names) {
        None => {
            errors.push(OutputError::MissingField(name));
            None
        }
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => {
            errors.push(OutputError::BadType {
                field: name,
                expected: "a string",
            });
            None
        }
    }
}

fn enum_field<T: std::str::FromStr>(
    obj: &Map<String, Value>,
    name: &'static str,
    aliases: &[&str],
    errors: &mut Vec<OutputError>,
) -> Option<T> {
    let raw = text_field(obj, name, aliases, errors)?;
    match raw.parse() {
        Ok(v) => Some(v),
        Err(_) => {
            errors.push(OutputError::BadEnum { field: name, value: raw });
            None
        }
    }
}

fn object(raw: &Value) -> Result<&Map<String, Value>, Vec<OutputError>> {
    raw.as_object().ok_or_else(|| vec![OutputError::NotObject])
}

/// Checks the four output fields. All problems are reported together.
pub fn validate_robot_output(raw: &Value) -> Result<RobotOutput, Vec<OutputError>> {
    let obj = object(raw)?;
    let mut errors = Vec::new();
    let speak = text_field(obj, "speak", &["robotSpeak"], &mut errors);
    let state: Option<OutputState> = enum_field(obj, "state", &[], &mut errors);
    let draw: Option<DrawMode> = enum_field(obj, "draw", &["robotDraw"], &mut errors);
    let task = match field(obj, &["task"]) {
        None => {
            errors.push(OutputError::MissingField("task"));
            None
        }
        Some(Value::Array(items)) => {
            let mut steps = Vec::with_capacity(items.len());
            for (i, item) in items.iter().enumerate() {
                match item.as_str() {
                    Some(s) if !s.trim().is_empty() => steps.push(s.trim().to_string()),
                    Some(_) => errors.push(OutputError::EmptyTaskStep(i)),
                    None => errors.push(OutputError::BadType {
                        field: "task",
                        expected: "a list of strings",
                    }),
                }
            }
            Some(steps)
        }
        Some(_) => {
            errors.push(OutputError::BadType {
                field: "task",
                expected: "a list of strings",
            });
            None
        }
    };
    if state == Some(OutputState::Confirmed) {
        if let Some(d) = draw.filter(|d| *d != DrawMode::None) {
            errors.push(OutputError::BadEnum {
                field: "draw",
                value: d.to_string(),
            });
        }
    }
    match (speak, state, draw, task) {
        (Some(speak), Some(state), Some(draw), Some(task)) if errors.is_empty() => Ok(RobotOutput {
            speak,
            state,
            draw,
            task,
        }),
        _ => Err(errors),
    }
}

/// Pulls the JSON object out of a response that may be wrapped in prose
/// or a code fence.
fn json_body(raw: &str) -> &str {
    match (raw.find('{'), raw.rfind('}')) {
        (Some(a), Some(b)) if a < b => &raw[a..=b],
        _ => raw,
    }
}

/// Parses and validates a full provider response.
pub fn parse_reply(raw: &str) -> Result<ProviderReply, Vec<OutputError>> {
    let value: Value = serde_json::from_str(json_body(raw)).map_err(|e| vec![OutputError::NotJson(e.to_string())])?;
    let obj = object(&value)?;
    let mut errors = Vec::new();
    let output = validate_robot_output(&value).map_err(|e| errors.extend(e)).ok();

    let intent = match field(obj, &["intent"]) {
        None => None,
        Some(Value::String(s)) => match s.parse() {
            Ok(i) => Some(i),
            Err(_) => {
                errors.push(OutputError::BadEnum {
                    field: "intent",
                    value: s.clone(),
                });
                None
            }
        },
        Some(_) => {
            errors.push(OutputError::BadType {
                field: "intent",
                expected: "a string",
            });
            None
        }
    };
    let draw_script = match field(obj, &["drawScript", "code"]) {
        Some(Value::String(s)) => Some(s.clone()),
        _ => None,
    };
    let draw_config = match field(obj, &["drawConfig", "config"]) {
        None => None,
        Some(v) => match serde_json::from_value(v.clone()) {
            Ok(c) => Some(c),
            Err(e) => {
                errors.push(OutputError::BadDrawConfig(e.to_string()));
                None
            }
        },
    };
    let wake_word = match field(obj, &["wakeWord"]) {
        Some(Value::String(s)) if !s.trim().is_empty() => Some(s.trim().to_string()),
        _ => None,
    };
    let program = match field(obj, &["program"]) {
        Some(Value::String(s)) => match parse_ir(s) {
            Ok(p) => Some(p),
            Err(e) => {
                errors.push(OutputError::BadProgram(e));
                None
            }
        },
        _ => None,
    };
    match output {
        Some(output) if errors.is_empty() => Ok(ProviderReply {
            output,
            intent,
            draw_script,
            draw_config,
            wake_word,
            program,
        }),
        _ => Err(errors),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn valid() {
        let out = validate_robot_output(&json!({"speak":"OK","state":"communicating","draw":"feedback","task":["go to pantry"]}))
            .unwrap();
        assert_eq!(out.draw, DrawMode::Feedback);
        assert_eq!(out.task, vec!["go to pantry"]);
    }

    #[test]
    fn errors_are_collected() {
        let errs = validate_robot_output(&json!({"speak":"OK","state":"done","task":["", 3]})).unwrap_err();
        assert_eq!(
            errs,
            vec![
                OutputError::BadEnum {
                    field: "state",
                    value: "done".into()
                },
                OutputError::MissingField("draw"),
                OutputError::EmptyTaskStep(0),
                OutputError::BadType {
                    field: "task",
                    expected: "a list of strings"
                },
            ]
        );
    }

    #[test]
    fn confirmed_requires_no_drawing() {
        let errs = validate_robot_output(&json!({"speak":"OK","state":"confirmed","draw":"confirm","task":[]})).unwrap_err();
        assert_eq!(
            errs,
            vec![OutputError::BadEnum {
                field: "draw",
                value: "confirm".into()
            }]
        );
    }

    #[test]
    fn reply_extras_and_aliases() {
        let raw = "```json\n{\"robotSpeak\":\"Hi\",\"state\":\"communicating\",\"robotDraw\":\"none\",\"task\":[],\"intent\":\"inquire\",\"wakeWord\":\" go \"}\n```";
        let reply = parse_reply(raw).unwrap();
        assert_eq!(reply.output.speak, "Hi");
        assert_eq!(reply.intent, Some(IntentClass::Inquire));
        assert_eq!(reply.wake_word.as_deref(), Some("go"));
        assert!(matches!(parse_reply("garbage").unwrap_err()[0], OutputError::NotJson(_)));
        assert_eq!(parse_reply("[1]").unwrap_err(), vec![OutputError::NotObject]);
    }
}
