//! One gateway session: the dialogue state, the test-mode interpreter and
//! the translation of turn effects into wire messages.

use taskviz_core::dialogue::{settle_turn, Effect, Orchestrator, SessionState, TurnError, TurnOutcome, TurnRecord};
use taskviz_core::domain::DialoguePhase;
use taskviz_core::draw::{serialize_draw_program, FrameTiming};
use taskviz_core::sim::{SimError, Status, TraceEntry, MICROS_PER_SECOND};
use taskviz_core::task::serialize_ir;
use taskviz_core::{Interpreter, Map};

use crate::wire::{
    output_rank, DrawPayload, ErrorPayload, GatewayError, MessageType, ProgramPayload, SimInput, SpeakPayload,
    StatePayload, UtterancePayload, WireMessage,
};

/// Test-mode questions are abandoned after this much virtual time.
pub const ASK_IDLE_TIMEOUT: u64 = 120 * MICROS_PER_SECOND;

/// A client message that passed schema and phase checks.
#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Utterance(String),
    Confirm,
    Deploy,
    TestEnter,
    TestExit,
    Sim(SimInput),
    /// `new_session` and `replay`: answer with the current state.
    Announce,
}

impl Command {
    /// Whether the command is a dialogue turn that needs a turn record.
    pub fn is_turn(&self) -> bool {
        matches!(self, Command::Utterance(_) | Command::Confirm)
    }
}

#[derive(Debug)]
pub struct Session {
    pub id: String,
    pub state: SessionState,
    map: Map,
    timing: FrameTiming,
    sim: Option<Interpreter>,
    last_in: Option<u64>,
    out_seq: u64,
}

impl Session {
    pub fn new(id: impl Into<String>, map: Map, timing: FrameTiming) -> Self {
        Session {
            id: id.into(),
            state: SessionState::new(),
            map,
            timing,
            sim: None,
            last_in: None,
            out_seq: 0,
        }
    }

    pub fn phase(&self) -> DialoguePhase {
        self.state.phase
    }

    pub fn simulator(&self) -> Option<&Interpreter> {
        self.sim.as_ref()
    }

    fn out(&mut self, kind: MessageType, payload: impl serde::Serialize) -> WireMessage {
        self.out_seq += 1;
        WireMessage::new(kind, self.id.clone(), self.out_seq, payload)
    }

    pub fn error(&mut self, err: &GatewayError, reply_to: Option<u64>) -> WireMessage {
        let payload = ErrorPayload {
            code: err.code().into(),
            message: err.to_string(),
            reply_to,
        };
        self.out(MessageType::Error, payload)
    }

    fn state_message(&mut self) -> WireMessage {
        let payload = StatePayload {
            phase: self.state.phase,
            task_steps: self.state.task_steps.clone(),
            wake_word: self.state.wake_word.clone(),
        };
        self.out(MessageType::State, payload)
    }

    /// Checks sequencing, phase and payload of an incoming message.
    pub fn accept(&mut self, msg: &WireMessage) -> Result<Command, GatewayError> {
        if !msg.kind.is_client() {
            return Err(GatewayError::Schema(format!("`{}` is a server message", msg.kind)));
        }
        if let Some(last) = self.last_in {
            if msg.seq <= last {
                return Err(GatewayError::Schema(format!("seq {} does not follow {last}", msg.seq)));
            }
        }
        self.last_in = Some(msg.seq);
        if !msg.kind.legal_phases().contains(&self.state.phase) {
            return Err(GatewayError::BadPhase {
                kind: msg.kind,
                phase: self.state.phase,
            });
        }
        Ok(match msg.kind {
            MessageType::Utterance => {
                let p: UtterancePayload = msg.payload()?;
                if p.text.trim().is_empty() {
                    return Err(GatewayError::Schema("utterance text is empty".into()));
                }
                Command::Utterance(p.text)
            }
            MessageType::Confirm => Command::Confirm,
            MessageType::Deploy => Command::Deploy,
            MessageType::TestEnter => Command::TestEnter,
            MessageType::TestExit => Command::TestExit,
            MessageType::SimEvent => Command::Sim(SimInput::from_value(&msg.payload)?),
            _ => Command::Announce,
        })
    }

    /// Runs a dialogue turn against the provider. Returns the messages and
    /// the record to persist.
    pub async fn live_turn(
        &mut self,
        orchestrator: &Orchestrator,
        command: &Command,
        at: u64,
    ) -> Result<(Vec<WireMessage>, TurnRecord), GatewayError> {
        let (outcome, record) = match command {
            Command::Utterance(text) => orchestrator.run_turn(&self.state, text, at).await,
            Command::Confirm => orchestrator.confirm(&self.state, at),
            _ => unreachable!("only turns reach the orchestrator"),
        }
        .map_err(|e| self.turn_error(e))?;
        Ok((self.commit(outcome), record))
    }

    /// Recomputes a persisted turn.
    pub fn recorded_turn(&mut self, record: &TurnRecord) -> Result<Vec<WireMessage>, GatewayError> {
        let outcome = settle_turn(&self.state, record, &self.timing).map_err(|e| self.turn_error(e))?;
        Ok(self.commit(outcome))
    }

    fn turn_error(&self, err: TurnError) -> GatewayError {
        match err {
            TurnError::IllegalTransition { .. } | TurnError::BadPhase(_) => GatewayError::BadPhase {
                kind: MessageType::Confirm,
                phase: self.state.phase,
            },
            other => GatewayError::Schema(other.to_string()),
        }
    }

    fn commit(&mut self, outcome: TurnOutcome) -> Vec<WireMessage> {
        self.state = outcome.state;
        let mut messages = vec![self.state_message()];
        let mut effects = outcome.effects;
        effects.sort_by_key(|e| match e {
            Effect::Speak { .. } => 1,
            Effect::Draw { .. } | Effect::DrawFailed { .. } => 2,
            Effect::CompileProgram { .. } => 3,
        });
        for effect in effects {
            let m = match effect {
                Effect::Speak { text } => self.out(MessageType::Speak, SpeakPayload { text }),
                Effect::Draw {
                    mode,
                    program,
                    config,
                    frames,
                } => self.out(
                    MessageType::Draw,
                    DrawPayload {
                        mode,
                        frames: frames.frames,
                        script: serialize_draw_program(&program),
                        config,
                    },
                ),
                Effect::DrawFailed { reason } => self.out(
                    MessageType::Error,
                    ErrorPayload {
                        code: "drawFailed".into(),
                        message: reason,
                        reply_to: None,
                    },
                ),
                Effect::CompileProgram { program } => self.out(
                    MessageType::Program,
                    ProgramPayload {
                        ir: serialize_ir(&program),
                    },
                ),
            };
            messages.push(m);
        }
        messages
    }

    /// Applies a command that does not involve the provider.
    pub fn apply_local(&mut self, command: Command) -> Result<Vec<WireMessage>, GatewayError> {
        let bad_phase = |kind, phase| GatewayError::BadPhase { kind, phase };
        let phase = self.state.phase;
        match command {
            Command::Announce => Ok(vec![self.state_message()]),
            Command::Deploy => {
                let ir = self
                    .state
                    .deploy()
                    .map(serialize_ir)
                    .map_err(|e| GatewayError::Schema(e.to_string()))?;
                let state = self.state_message();
                let program = self.out(MessageType::Program, ProgramPayload { ir });
                Ok(vec![state, program])
            }
            Command::TestEnter => {
                let program = self.state.program.clone().ok_or(bad_phase(MessageType::TestEnter, phase))?;
                self.state.enter_test().map_err(|_| bad_phase(MessageType::TestEnter, phase))?;
                let mut interp = Interpreter::new(&program, self.map.clone()).with_ask_timeout(ASK_IDLE_TIMEOUT);
                interp.run();
                self.sim = Some(interp);
                Ok(vec![self.state_message()])
            }
            Command::TestExit => {
                self.state.exit_test().map_err(|_| bad_phase(MessageType::TestExit, phase))?;
                self.sim = None;
                Ok(vec![self.state_message()])
            }
            Command::Sim(input) => self.inject(input),
            Command::Utterance(_) | Command::Confirm => unreachable!("turns go through the orchestrator"),
        }
    }

    fn inject(&mut self, input: SimInput) -> Result<Vec<WireMessage>, GatewayError> {
        let interp = self.sim.as_mut().ok_or(GatewayError::BadPhase {
            kind: MessageType::SimEvent,
            phase: self.state.phase,
        })?;
        let was_failed = matches!(interp.status(), Status::Failed(_));
        let t = input.t();
        if let SimInput::Event(event) = input {
            interp.push(event).map_err(|e| GatewayError::Schema(e.to_string()))?;
        }
        let mut entries: Vec<TraceEntry> = interp.run();
        loop {
            let more = interp.advance_to(t);
            if more.is_empty() {
                break;
            }
            entries.extend(more);
        }
        let failure: Option<SimError> = match interp.status() {
            Status::Failed(e) if !was_failed => Some(e.clone()),
            _ => None,
        };
        let mut messages = vec![self.state_message()];
        for entry in entries {
            messages.push(self.out(MessageType::TraceEntry, entry));
        }
        if let Some(e) = failure {
            let payload = ErrorPayload {
                code: "simFailed".into(),
                message: e.to_string(),
                reply_to: None,
            };
            messages.push(self.out(MessageType::Error, payload));
        }
        debug_assert!(messages.windows(2).all(|w| output_rank(w[0].kind) <= output_rank(w[1].kind)));
        Ok(messages)
    }
}
