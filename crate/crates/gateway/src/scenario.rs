//! Scenario files: a scripted client conversation paired with the provider
//! outputs the mock provider returns for it.
//!
//! ```toml
//! name = "demo"
//!
//! [[step]]
//! utterance = "Go to the pantry"
//! expect = "(?i)pantry"          # optional, defaults to the utterance itself
//! rejected = ["not json"]         # optional outputs served first, one per retry
//! [step.reply]
//! speak = "Sure."
//! state = "communicating"
//! draw = "feedback"
//! task = ["go to Pantry"]
//! draw_script = '''
//! link("Starting point", "Pantry", "blue", "solid", "go to pantry", 1)
//! '''
//!
//! [[step]]
//! action = "confirm"              # confirm | deploy | test_enter | test_exit
//!
//! [[step]]
//! sim = { kind = "wakeUttered", keyword = "hello", t = 0.0 }
//! ```

use std::ops::Range;
use std::path::Path;
use std::sync::Mutex;

use async_trait::async_trait;
use regex::Regex;
use serde::Deserialize;
use serde_json::{json, Map, Value};
use taskviz_core::dialogue::{parse_reply, IntentClass, Provider, ProviderError, ProviderRequest};
use taskviz_core::domain::SequenceItem;
use taskviz_core::draw::{parse_draw_script, validate_program, ProgramIssue, ScriptError};
use taskviz_core::task::parse_ir;
use thiserror::Error;
use toml::Spanned;

use crate::wire::{MessageType, SimInput, UtterancePayload, WireMessage};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: {message}")]
    Invalid { line: usize, message: String },
    #[error("line {line}: draw script: {error}")]
    Draw { line: usize, error: ScriptError },
    #[error("line {line}: draw script: {issue}")]
    DrawIssue { line: usize, issue: ProgramIssue },
    #[error("scenario has no steps")]
    Empty,
    #[error("cannot read scenario: {0}")]
    Io(String),
}

impl ScenarioError {
    pub fn line(&self) -> Option<usize> {
        match self {
            ScenarioError::Parse { line, .. }
            | ScenarioError::Invalid { line, .. }
            | ScenarioError::Draw { line, .. }
            | ScenarioError::DrawIssue { line, .. } => Some(*line),
            _ => None,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: String,
    #[serde(default)]
    description: String,
    #[serde(default)]
    session: Option<String>,
    #[serde(default)]
    step: Vec<Spanned<RawStep>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStep {
    utterance: Option<String>,
    expect: Option<String>,
    /// Raw outputs served for this utterance before `reply`, one per attempt.
    #[serde(default)]
    rejected: Vec<String>,
    reply: Option<Spanned<RawReply>>,
    action: Option<String>,
    sim: Option<toml::Value>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawReply {
    /// Sent verbatim instead of a structured reply.
    raw: Option<String>,
    speak: Option<String>,
    state: Option<String>,
    draw: Option<String>,
    #[serde(default)]
    task: Vec<String>,
    intent: Option<String>,
    wake_word: Option<String>,
    draw_script: Option<Spanned<String>>,
    sequence: Option<Vec<SequenceItem>>,
    program: Option<Spanned<String>>,
}

/// One client action of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub enum ClientStep {
    Utterance(String),
    Control(MessageType),
    Sim(SimInput),
}

impl ClientStep {
    pub fn to_message(&self, session: &str, seq: u64) -> WireMessage {
        match self {
            ClientStep::Utterance(text) => {
                WireMessage::new(MessageType::Utterance, session, seq, UtterancePayload { text: text.clone() })
            }
            ClientStep::Control(kind) => WireMessage::new(*kind, session, seq, json!({})),
            ClientStep::Sim(input) => WireMessage::new(MessageType::SimEvent, session, seq, input.to_value()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScriptedTurn {
    pub pattern: Regex,
    /// The provider response, as raw text.
    pub response: String,
    pub line: usize,
}

/// The provider side of a scenario: responses matched in order.
#[derive(Debug, Clone, Default)]
pub struct ScenarioScript {
    pub turns: Vec<ScriptedTurn>,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub session: String,
    pub steps: Vec<ClientStep>,
    pub script: ScenarioScript,
}

impl Scenario {
    /// The client messages of the scenario, opening with `new_session`.
    pub fn client_messages(&self) -> Vec<WireMessage> {
        let mut out = vec![WireMessage::new(MessageType::NewSession, self.session.clone(), 1, json!({}))];
        for (i, step) in self.steps.iter().enumerate() {
            out.push(step.to_message(&self.session, i as u64 + 2));
        }
        out
    }
}

struct LineIndex(Vec<usize>);

impl LineIndex {
    fn new(src: &str) -> Self {
        LineIndex(std::iter::once(0).chain(src.match_indices('\n').map(|(i, _)| i + 1)).collect())
    }

    /// 1-based line of a byte offset.
    fn line(&self, offset: usize) -> usize {
        match self.0.binary_search(&offset) {
            Ok(i) => i + 1,
            Err(i) => i,
        }
    }
}

/// Line on which the content of a string value starts, skipping the
/// newline that directly follows a multi-line opening delimiter.
fn content_line(src: &str, lines: &LineIndex, span: &Range<usize>) -> usize {
    let text = &src[span.clone()];
    let skip = ["\"\"\"\n", "'''\n", "\"\"\"\r\n", "'''\r\n"].iter().any(|d| text.starts_with(d));
    lines.line(span.start) + usize::from(skip)
}

pub fn parse_scenario(src: &str) -> Result<Scenario, ScenarioError> {
    let lines = LineIndex::new(src);
    let raw: RawScenario = toml::from_str(src).map_err(|e| ScenarioError::Parse {
        line: e.span().map(|s| lines.line(s.start)).unwrap_or(1),
        message: e.message().to_string(),
    })?;
    if raw.step.is_empty() {
        return Err(ScenarioError::Empty);
    }
    let mut steps = Vec::new();
    let mut turns = Vec::new();
    for spanned in raw.step {
        let line = lines.line(spanned.span().start);
        let invalid = |message: String| ScenarioError::Invalid { line, message };
        let step = spanned.into_inner();
        let given = [step.utterance.is_some(), step.action.is_some(), step.sim.is_some()];
        if given.iter().filter(|g| **g).count() != 1 {
            return Err(invalid("a step needs exactly one of `utterance`, `action` or `sim`".into()));
        }
        if let Some(text) = step.utterance {
            let reply = step.reply.ok_or_else(|| invalid("an utterance step needs a `reply`".into()))?;
            let pattern = match &step.expect {
                Some(p) => Regex::new(p).map_err(|e| invalid(format!("bad `expect` pattern: {e}")))?,
                None => Regex::new(&format!(r"(?i)^\s*{}\s*$", regex::escape(text.trim()))).expect("escaped literal"),
            };
            if !pattern.is_match(&text) {
                return Err(invalid("`expect` does not match the step's own utterance".into()));
            }
            for raw in step.rejected {
                turns.push(ScriptedTurn {
                    pattern: pattern.clone(),
                    response: raw,
                    line,
                });
            }
            let reply_line = lines.line(reply.span().start);
            let response = build_response(src, &lines, reply.into_inner(), reply_line)?;
            turns.push(ScriptedTurn {
                pattern,
                response,
                line,
            });
            steps.push(ClientStep::Utterance(text));
        } else if step.reply.is_some() || step.expect.is_some() || !step.rejected.is_empty() {
            return Err(invalid("only utterance steps take `reply`, `rejected` or `expect`".into()));
        } else if let Some(action) = step.action {
            let kind = match action.as_str() {
                "confirm" => MessageType::Confirm,
                "deploy" => MessageType::Deploy,
                "test_enter" => MessageType::TestEnter,
                "test_exit" => MessageType::TestExit,
                other => return Err(invalid(format!("unknown action `{other}`"))),
            };
            steps.push(ClientStep::Control(kind));
        } else if let Some(sim) = step.sim {
            let value = serde_json::to_value(sim).map_err(|e| invalid(e.to_string()))?;
            let input = SimInput::from_value(&value).map_err(|e| invalid(e.to_string()))?;
            steps.push(ClientStep::Sim(input));
        }
    }
    let session = raw.session.unwrap_or_else(|| raw.name.clone());
    Ok(Scenario {
        name: raw.name,
        description: raw.description,
        session,
        steps,
        script: ScenarioScript { turns },
    })
}

/// Offset of the script line holding element `index`.
fn element_line(script: &str, index: usize) -> usize {
    script
        .lines()
        .enumerate()
        .filter(|(_, l)| parse_draw_script(l).is_ok_and(|p| p.len() == 1))
        .nth(index)
        .map_or(0, |(i, _)| i)
}

fn build_response(src: &str, lines: &LineIndex, reply: RawReply, line: usize) -> Result<String, ScenarioError> {
    let invalid = |message: String| ScenarioError::Invalid { line, message };
    if let Some(raw) = reply.raw {
        let structured = reply.speak.is_some() || reply.state.is_some() || reply.draw.is_some();
        if structured {
            return Err(invalid("`raw` replies take no other fields".into()));
        }
        return Ok(raw);
    }
    let mut obj = Map::new();
    let required = |field: &str, v: Option<String>| v.ok_or_else(|| invalid(format!("reply is missing `{field}`")));
    obj.insert("speak".into(), Value::String(required("speak", reply.speak)?));
    obj.insert("state".into(), Value::String(required("state", reply.state)?));
    obj.insert("draw".into(), Value::String(required("draw", reply.draw)?));
    obj.insert("task".into(), json!(reply.task));
    if let Some(intent) = reply.intent {
        intent
            .parse::<IntentClass>()
            .map_err(|e| invalid(e.to_string()))?;
        obj.insert("intent".into(), Value::String(intent));
    }
    if let Some(w) = reply.wake_word {
        obj.insert("wakeWord".into(), Value::String(w));
    }
    if let Some(script) = reply.draw_script {
        let first = content_line(src, lines, &script.span());
        let program = parse_draw_script(script.get_ref()).map_err(|errors| {
            let error = errors.into_iter().next().expect("errors are non-empty");
            ScenarioError::Draw {
                line: first + error.line - 1,
                error,
            }
        })?;
        if let Some(issue) = validate_program(&program).into_iter().next() {
            return Err(ScenarioError::DrawIssue {
                line: first + element_line(script.get_ref(), issue.index()),
                issue,
            });
        }
        obj.insert("drawScript".into(), Value::String(script.into_inner()));
    }
    if let Some(sequence) = reply.sequence {
        let mode = obj["draw"].clone();
        obj.insert("drawConfig".into(), json!({"mode": mode, "sequence": sequence}));
    }
    if let Some(program) = reply.program {
        let first = content_line(src, lines, &program.span());
        if let Err(e) = parse_ir(program.get_ref()) {
            return Err(ScenarioError::Invalid {
                line: first + e.line - 1,
                message: format!("program: {}", e.message),
            });
        }
        obj.insert("program".into(), Value::String(program.into_inner()));
    }
    let text = Value::Object(obj).to_string();
    if let Err(errors) = parse_reply(&text) {
        let list: Vec<String> = errors.iter().map(ToString::to_string).collect();
        return Err(invalid(list.join("; ")));
    }
    Ok(text)
}

pub fn load_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    let src = std::fs::read_to_string(path).map_err(|e| ScenarioError::Io(format!("{}: {e}", path.display())))?;
    parse_scenario(&src)
}

/// Mock provider that answers from a scenario script, in order.
#[derive(Debug)]
pub struct ScenarioProvider {
    turns: Vec<ScriptedTurn>,
    next: Mutex<usize>,
}

impl ScenarioProvider {
    pub fn new(script: &ScenarioScript) -> Self {
        Self::resume(script, 0)
    }

    /// Starts after the first `consumed` responses.
    pub fn resume(script: &ScenarioScript, consumed: usize) -> Self {
        ScenarioProvider {
            turns: script.turns.clone(),
            next: Mutex::new(consumed.min(script.turns.len())),
        }
    }

    pub fn remaining(&self) -> usize {
        self.turns.len() - *self.next.lock().expect("poisoned")
    }
}

#[async_trait]
impl Provider for ScenarioProvider {
    async fn request(&self, request: &ProviderRequest) -> Result<String, ProviderError> {
        let mut next = self.next.lock().expect("poisoned");
        let turn = self
            .turns
            .get(*next)
            .ok_or_else(|| ProviderError::Exhausted(request.utterance.clone()))?;
        if !turn.pattern.is_match(&request.utterance) {
            return Err(ProviderError::Mismatch(format!(
                "line {} expects /{}/, got `{}`",
                turn.line, turn.pattern, request.utterance
            )));
        }
        *next += 1;
        Ok(turn.response.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use taskviz_core::draw::ScriptErrorKind;

    const OK: &str = r#"
name = "t"

[[step]]
utterance = "Go to the pantry"
[step.reply]
speak = "Sure."
state = "communicating"
draw = "feedback"
task = ["go to Pantry"]
draw_script = '''
mark("Starting point", "green", "wakeup", 1)
link("Starting point", "Pantry", "blue", "solid", "go", 2)
'''

[[step]]
action = "confirm"

[[step]]
sim = { kind = "humanPresent", t = 3.2 }
"#;

    #[test]
    fn loads() {
        let s = parse_scenario(OK).unwrap();
        assert_eq!(s.session, "t");
        assert_eq!(s.steps.len(), 3);
        assert_eq!(s.script.turns.len(), 1);
        assert!(s.script.turns[0].pattern.is_match("go to the PANTRY"));
        assert_eq!(s.client_messages().len(), 4);
    }

    #[test]
    fn bad_color_is_reported_on_its_line() {
        let src = OK.replace("\"blue\", \"solid\"", "\"teal\", \"solid\"");
        match parse_scenario(&src) {
            Err(ScenarioError::Draw { line, error }) => {
                assert_eq!(line, 13);
                assert!(matches!(error.kind, ScriptErrorKind::BadEnum { field: "color", .. }));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn structural_errors() {
        assert!(matches!(parse_scenario(""), Err(ScenarioError::Parse { .. })));
        assert_eq!(parse_scenario("name = \"x\"\n").unwrap_err(), ScenarioError::Empty);
        let err = parse_scenario("name = \"x\"\n\n[[step]]\naction = \"dance\"\n").unwrap_err();
        assert_eq!(err.line(), Some(3));
        let err = parse_scenario("name = \"x\"\n[[step]]\nutterance = \"hi\"\n").unwrap_err();
        assert!(matches!(err, ScenarioError::Invalid { .. }));
        let err = parse_scenario("name = \"x\"\nbogus = [\n").unwrap_err();
        assert!(matches!(err, ScenarioError::Parse { line: 2 | 3, .. }));
    }

    #[tokio::test]
    async fn provider_matches_in_order_and_reports_exhaustion() {
        let s = parse_scenario(OK).unwrap();
        let p = ScenarioProvider::new(&s.script);
        let mut req = ProviderRequest {
            utterance: "hello".into(),
            intent: IntentClass::Unrelated,
            phase: Default::default(),
            task_steps: vec![],
            wake_word: None,
            history: vec![],
            last_draw_script: None,
            system_context: String::new(),
        };
        assert!(matches!(p.request(&req).await, Err(ProviderError::Mismatch(_))));
        req.utterance = "go to the pantry".into();
        assert!(p.request(&req).await.is_ok());
        assert!(matches!(p.request(&req).await, Err(ProviderError::Exhausted(_))));
    }
}
