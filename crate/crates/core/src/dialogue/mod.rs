//! The customization dialogue: intent rules, provider output validation,
//! session state and turn processing.

mod intent;
mod orchestrator;
mod output;
mod provider;
mod session;
mod turn;

pub use intent::{classify_intent, IntentClass};
pub use orchestrator::Orchestrator;
pub use output::{parse_reply, validate_robot_output, OutputError, ProviderReply};
pub use provider::{system_context, Provider, ProviderError, ProviderRequest, ProviderSettings, ScriptedProvider};
pub use session::{HistoryEntry, PhaseError, SessionState, Speaker};
pub use turn::{
    apply_turn, check_reply, sequence_from_steps, settle_turn, try_attempt, wake_word_in, Attempt, Effect, TurnError,
    TurnInput, TurnOutcome, TurnRecord, CONFIRM_SPEAK, MAX_TURNS, REPEAT_PROMPT, TURN_LIMIT_PROMPT,
};
