//! JSON envelope exchanged over the WebSocket, one message per text frame.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use taskviz_core::domain::{DialoguePhase, DrawConfig, DrawMode};
use taskviz_core::draw::Frame;
use taskviz_core::sim::{micros_from_secs, Micros, SimEvent};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MessageType {
    Utterance,
    Confirm,
    Deploy,
    TestEnter,
    TestExit,
    SimEvent,
    NewSession,
    Replay,
    Speak,
    Draw,
    State,
    Program,
    TraceEntry,
    Error,
}

impl MessageType {
    pub const CLIENT: [MessageType; 8] = [
        MessageType::Utterance,
        MessageType::Confirm,
        MessageType::Deploy,
        MessageType::TestEnter,
        MessageType::TestExit,
        MessageType::SimEvent,
        MessageType::NewSession,
        MessageType::Replay,
    ];

    pub fn is_client(self) -> bool {
        Self::CLIENT.contains(&self)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MessageType::Utterance => "utterance",
            MessageType::Confirm => "confirm",
            MessageType::Deploy => "deploy",
            MessageType::TestEnter => "test_enter",
            MessageType::TestExit => "test_exit",
            MessageType::SimEvent => "sim_event",
            MessageType::NewSession => "new_session",
            MessageType::Replay => "replay",
            MessageType::Speak => "speak",
            MessageType::Draw => "draw",
            MessageType::State => "state",
            MessageType::Program => "program",
            MessageType::TraceEntry => "trace_entry",
            MessageType::Error => "error",
        }
    }

    /// Phases in which a client message is accepted. Session management
    /// messages are accepted in any phase.
    pub fn legal_phases(self) -> &'static [DialoguePhase] {
        use DialoguePhase::*;
        match self {
            MessageType::Utterance => &[Communicating, ConfirmPending, Deployed],
            MessageType::Confirm => &[ConfirmPending],
            MessageType::Deploy => &[Confirmed],
            MessageType::TestEnter => &[Deployed],
            MessageType::TestExit | MessageType::SimEvent => &[Testing],
            MessageType::NewSession | MessageType::Replay => DialoguePhase::ALL,
            _ => &[],
        }
    }
}

impl std::fmt::Display for MessageType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireMessage {
    #[serde(rename = "type")]
    pub kind: MessageType,
    #[serde(default)]
    pub session: String,
    pub seq: u64,
    #[serde(default)]
    pub payload: Value,
}

impl WireMessage {
    pub fn new(kind: MessageType, session: impl Into<String>, seq: u64, payload: impl Serialize) -> Self {
        WireMessage {
            kind,
            session: session.into(),
            seq,
            payload: serde_json::to_value(payload).expect("payloads serialize"),
        }
    }

    pub fn parse(text: &str) -> Result<Self, GatewayError> {
        serde_json::from_str(text).map_err(|e| GatewayError::Schema(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("messages serialize")
    }

    /// Decodes the payload of a client message.
    pub fn payload<T: for<'de> Deserialize<'de>>(&self) -> Result<T, GatewayError> {
        let value = if self.payload.is_null() {
            Value::Object(Default::default())
        } else {
            self.payload.clone()
        };
        serde_json::from_value(value).map_err(|e| GatewayError::Schema(format!("{} payload: {e}", self.kind)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GatewayError {
    #[error("unknown session `{0}`")]
    UnknownSession(String),
    #[error("`{kind}` is not allowed in phase {phase}")]
    BadPhase { kind: MessageType, phase: DialoguePhase },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("session `{0}` already exists")]
    SessionExists(String),
    #[error("replay failed: {0}")]
    Replay(String),
}

impl GatewayError {
    pub fn code(&self) -> &'static str {
        match self {
            GatewayError::UnknownSession(_) => "unknownSession",
            GatewayError::BadPhase { .. } => "badPhase",
            GatewayError::Schema(_) => "schemaError",
            GatewayError::SessionExists(_) => "sessionExists",
            GatewayError::Replay(_) => "replayFailed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UtterancePayload {
    pub text: String,
}

/// What a `sim_event` carries: an event for the interpreter, or a request
/// to move the virtual clock forward (`{"kind":"advance","t":secs}`).
#[derive(Debug, Clone, PartialEq)]
pub enum SimInput {
    Event(SimEvent),
    Advance(Micros),
}

impl SimInput {
    pub fn t(&self) -> Micros {
        match self {
            SimInput::Event(e) => e.t(),
            SimInput::Advance(t) => *t,
        }
    }

    pub fn from_value(value: &Value) -> Result<Self, GatewayError> {
        if value.get("kind").and_then(Value::as_str) == Some("advance") {
            let t = value
                .get("t")
                .and_then(Value::as_f64)
                .and_then(micros_from_secs)
                .ok_or_else(|| GatewayError::Schema("advance needs a non-negative `t` in seconds".into()))?;
            return Ok(SimInput::Advance(t));
        }
        serde_json::from_value(value.clone())
            .map(SimInput::Event)
            .map_err(|e| GatewayError::Schema(format!("sim_event payload: {e}")))
    }

    pub fn to_value(&self) -> Value {
        match self {
            SimInput::Event(e) => serde_json::to_value(e).expect("events serialize"),
            SimInput::Advance(t) => serde_json::json!({"kind": "advance", "t": *t as f64 / 1e6}),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StatePayload {
    pub phase: DialoguePhase,
    pub task_steps: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wake_word: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpeakPayload {
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrawPayload {
    pub mode: DrawMode,
    pub frames: Vec<Frame<f64>>,
    /// The annotated drawing as a script.
    pub script: String,
    pub config: DrawConfig,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgramPayload {
    pub ir: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ErrorPayload {
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reply_to: Option<u64>,
}

/// Sort rank of server messages within one response.
pub fn output_rank(kind: MessageType) -> u8 {
    match kind {
        MessageType::State => 0,
        MessageType::Speak => 1,
        MessageType::Draw => 2,
        MessageType::Program => 3,
        MessageType::TraceEntry => 4,
        _ => 5,
    }
}
