use std::sync::Arc;

use crate::draw::{serialize_draw_program, FrameTiming};

use super::intent::classify_intent;
use super::provider::{system_context, Provider, ProviderError, ProviderRequest, ProviderSettings};
use super::session::{HistoryEntry, SessionState, Speaker};
use super::turn::{settle_turn, try_attempt, Attempt, TurnError, TurnInput, TurnOutcome, TurnRecord, MAX_TURNS};

/// Runs turns against a provider: classify, request with retries and an
/// optional timeout, validate, apply.
#[derive(Clone)]
pub struct Orchestrator {
    provider: Arc<dyn Provider>,
    settings: ProviderSettings,
    timing: FrameTiming,
}

impl Orchestrator {
    pub fn new(provider: Arc<dyn Provider>, settings: ProviderSettings) -> Self {
        Orchestrator {
            provider,
            settings,
            timing: FrameTiming::default(),
        }
    }

    pub fn with_timing(mut self, timing: FrameTiming) -> Self {
        self.timing = timing;
        self
    }

    pub fn timing(&self) -> &FrameTiming {
        &self.timing
    }

    pub fn settings(&self) -> &ProviderSettings {
        &self.settings
    }

    fn request(&self, state: &SessionState, utterance: &str, at: u64) -> ProviderRequest {
        let mut history = state.history.clone();
        history.push(HistoryEntry {
            speaker: Speaker::User,
            text: utterance.to_string(),
            at,
        });
        ProviderRequest {
            utterance: utterance.to_string(),
            intent: classify_intent(utterance, state.phase),
            phase: state.phase,
            task_steps: state.task_steps.clone(),
            wake_word: state.wake_word.clone(),
            history,
            last_draw_script: state.last_draw_program.as_ref().map(serialize_draw_program),
            system_context: system_context(),
        }
    }

    async fn call(&self, request: &ProviderRequest) -> Result<String, ProviderError> {
        match self.settings.timeout {
            Some(limit) => tokio::time::timeout(limit, self.provider.request(request))
                .await
                .unwrap_or(Err(ProviderError::Timeout)),
            None => self.provider.request(request).await,
        }
    }

    /// Processes one utterance. Provider failures never escape: after the
    /// retries are spent the robot asks the user to repeat.
    pub async fn run_turn(
        &self,
        state: &SessionState,
        utterance: &str,
        at: u64,
    ) -> Result<(TurnOutcome, TurnRecord), TurnError> {
        if !state.phase.accepts_utterances() {
            return Err(TurnError::BadPhase(state.phase));
        }
        let mut record = TurnRecord {
            at,
            input: TurnInput::Utterance {
                text: utterance.to_string(),
            },
            attempts: Vec::new(),
        };
        if state.user_turns() < MAX_TURNS {
            let request = self.request(state, utterance, at);
            let mut with_user = state.clone();
            with_user.history.push(HistoryEntry {
                speaker: Speaker::User,
                text: utterance.to_string(),
                at,
            });
            for _ in 0..=self.settings.retries {
                let attempt = match self.call(&request).await {
                    Ok(raw) => Attempt { raw: Some(raw), error: None },
                    Err(e) => Attempt {
                        raw: None,
                        error: Some(e.to_string()),
                    },
                };
                let ok = try_attempt(&with_user, request.intent, utterance, &attempt, at, &self.timing).is_ok();
                record.attempts.push(attempt);
                if ok {
                    break;
                }
            }
        }
        let outcome = settle_turn(state, &record, &self.timing)?;
        Ok((outcome, record))
    }

    /// Processes the confirm control. No provider call is made.
    pub fn confirm(&self, state: &SessionState, at: u64) -> Result<(TurnOutcome, TurnRecord), TurnError> {
        let record = TurnRecord {
            at,
            input: TurnInput::Confirm,
            attempts: Vec::new(),
        };
        let outcome = settle_turn(state, &record, &self.timing)?;
        Ok((outcome, record))
    }

    /// Recomputes a recorded turn without the provider.
    pub fn replay_turn(&self, state: &SessionState, record: &TurnRecord) -> Result<TurnOutcome, TurnError> {
        settle_turn(state, record, &self.timing)
    }
}
