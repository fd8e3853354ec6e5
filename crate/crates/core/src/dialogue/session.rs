use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{DialoguePhase, DrawConfig, DrawProgram};
use crate::task::{validate_robot_program, ProgramError, RobotProgram};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Speaker {
    User,
    Robot,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub speaker: Speaker,
    pub text: String,
    /// Milliseconds, as supplied by the caller's clock.
    pub at: u64,
}

/// Everything known about one customization session.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionState {
    pub phase: DialoguePhase,
    pub task_steps: Vec<String>,
    pub wake_word: Option<String>,
    pub history: Vec<HistoryEntry>,
    pub last_draw_program: Option<DrawProgram>,
    pub last_draw_config: Option<DrawConfig>,
    pub program: Option<RobotProgram>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PhaseError {
    #[error("cannot go from {from} to {to}")]
    IllegalTransition { from: DialoguePhase, to: DialoguePhase },
    #[error("no program has been generated")]
    NoProgram,
    #[error("program is invalid: {0:?}")]
    InvalidProgram(Vec<ProgramError>),
}

impl SessionState {
    pub fn new() -> Self {
        SessionState::default()
    }

    /// Number of user turns so far.
    pub fn user_turns(&self) -> usize {
        self.history.iter().filter(|h| h.speaker == Speaker::User).count()
    }

    /// Moves to `to` if the phase table allows it.
    pub fn transition(&mut self, to: DialoguePhase) -> Result<(), PhaseError> {
        if !self.phase.can_transition(to) {
            return Err(PhaseError::IllegalTransition { from: self.phase, to });
        }
        self.phase = to;
        Ok(())
    }

    /// Re-validates the generated program and marks it deployed.
    pub fn deploy(&mut self) -> Result<&RobotProgram, PhaseError> {
        if !self.phase.can_transition(DialoguePhase::Deployed) || self.phase != DialoguePhase::Confirmed {
            return Err(PhaseError::IllegalTransition {
                from: self.phase,
                to: DialoguePhase::Deployed,
            });
        }
        let program = self.program.as_ref().ok_or(PhaseError::NoProgram)?;
        let errors = validate_robot_program(program);
        if !errors.is_empty() {
            return Err(PhaseError::InvalidProgram(errors));
        }
        self.phase = DialoguePhase::Deployed;
        Ok(self.program.as_ref().expect("checked above"))
    }

    pub fn enter_test(&mut self) -> Result<(), PhaseError> {
        match self.phase {
            DialoguePhase::Deployed => self.transition(DialoguePhase::Testing),
            from => Err(PhaseError::IllegalTransition {
                from,
                to: DialoguePhase::Testing,
            }),
        }
    }

    pub fn exit_test(&mut self) -> Result<(), PhaseError> {
        match self.phase {
            DialoguePhase::Testing => self.transition(DialoguePhase::Deployed),
            from => Err(PhaseError::IllegalTransition {
                from,
                to: DialoguePhase::Deployed,
            }),
        }
    }
}
