//! The pluggable source of structured dialogue outputs.

use std::collections::VecDeque;
use std::sync::Mutex;
use std::time::Duration;

use async_trait::async_trait;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{Color, DialoguePhase, Icon, Location};

use super::intent::IntentClass;
use super::session::HistoryEntry;

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "kind", content = "detail", rename_all = "camelCase")]
pub enum ProviderError {
    #[error("provider timed out")]
    Timeout,
    #[error("provider transport failed: {0}")]
    Transport(String),
    #[error("provider has nothing scripted for `{0}`")]
    Exhausted(String),
    #[error("scripted provider expected a different utterance: {0}")]
    Mismatch(String),
    #[error("provider call was cancelled")]
    Cancelled,
}

/// What the provider sees for one turn.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProviderRequest {
    pub utterance: String,
    /// The rule table's classification, as a hint.
    pub intent: IntentClass,
    pub phase: DialoguePhase,
    pub task_steps: Vec<String>,
    pub wake_word: Option<String>,
    /// The full turn log, including this utterance.
    pub history: Vec<HistoryEntry>,
    /// The previous drawing as script text, if any.
    pub last_draw_script: Option<String>,
    pub system_context: String,
}

#[async_trait]
pub trait Provider: Send + Sync {
    /// Returns the raw response body for one turn.
    async fn request(&self, request: &ProviderRequest) -> Result<String, ProviderError>;
}

/// Provider configuration. Temperature defaults to 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderSettings {
    pub model: String,
    pub temperature: f64,
    pub timeout: Option<Duration>,
    pub retries: u32,
}

impl Default for ProviderSettings {
    fn default() -> Self {
        ProviderSettings {
            model: String::new(),
            temperature: 0.0,
            timeout: None,
            retries: 2,
        }
    }
}

/// Returns queued responses in order; for tests and fault injection.
#[derive(Debug, Default)]
pub struct ScriptedProvider {
    responses: Mutex<VecDeque<Result<String, ProviderError>>>,
    delay: Option<Duration>,
}

impl ScriptedProvider {
    pub fn new(responses: impl IntoIterator<Item = Result<String, ProviderError>>) -> Self {
        ScriptedProvider {
            responses: Mutex::new(responses.into_iter().collect()),
            delay: None,
        }
    }

    /// Sleeps before every response, for exercising timeouts.
    pub fn with_delay(mut self, delay: Duration) -> Self {
        self.delay = Some(delay);
        self
    }

    pub fn remaining(&self) -> usize {
        self.responses.lock().expect("poisoned").len()
    }
}

#[async_trait]
impl Provider for ScriptedProvider {
    async fn request(&self, request: &ProviderRequest) -> Result<String, ProviderError> {
        if let Some(d) = self.delay {
            tokio::time::sleep(d).await;
        }
        let next = self.responses.lock().expect("poisoned").pop_front();
        next.unwrap_or_else(|| Err(ProviderError::Exhausted(request.utterance.clone())))
    }
}

fn list<T: std::fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|i| format!("'{i}'")).collect::<Vec<_>>().join(", ")
}

/// Instructions for a live model: the output contract, the intent rules
/// and the drawing vocabulary.
pub fn system_context() -> String {
    format!(
        r#"You help a user define a task for a service robot in an office, through conversation.
The robot can: wait for a wake keyword, go to a place, say something, ask a question and store the reply, and look for a person for five seconds.
Places: {places}. 'somewhere' stands for a place chosen at run time.

Reply with one JSON object and nothing else:
{{"intent": one of {intents},
 "speak": what the robot says,
 "state": "communicating" or "confirmed",
 "draw": "feedback", "confirm" or "none",
 "task": the ordered task steps,
 "wakeWord": the activation keyword once known,
 "drawScript": mark()/link() calls drawing the whole task,
 "drawConfig": {{"mode": same as draw, "sequence": [{{"seq": "1", "text": step text, "feedback": false}}]}}}}

Intent rules:
- unrelated: keep task and state unchanged, draw none, steer back to the task.
- modify: update task as asked, draw feedback.
- inquire: answer from the current task, task unchanged, draw none.
- confirmRequest or complete: if no wake keyword is known, ask for one with draw none; otherwise present every step with draw confirm.
- finalConfirm (only right after a confirm presentation): state confirmed, draw none.

Task steps should use these forms when possible:
start with keyword K | go to PLACE | say TEXT | ask QUESTION into VAR | wait for a person into VAR |
if VAR contains WORD then: STEPS otherwise: STEPS | if VAR is true then: STEPS otherwise: STEPS

Drawing script:
mark(location, color, content, animSeq, feedbackType="none")
link(fromLocation, toLocation, color, lineType, text, animSeq, feedbackType="none")
color: {colors}. content: a step number or {icons}. lineType: 'solid' or 'dashed'; dashed only for conditional paths or paths involving 'somewhere'. animSeq is the number of the step the element belongs to.
Keep elements of unchanged steps exactly as they were."#,
        places = list(Location::PLACES.iter().map(|l| l.display_name())),
        intents = list(IntentClass::ALL),
        colors = list(Color::ALL),
        icons = list(Icon::ALL),
    )
}
