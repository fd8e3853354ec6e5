//! Session registry. Each session runs in its own task and drains a
//! mailbox, so messages for one session are handled strictly in order.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{SystemTime, UNIX_EPOCH};

use taskviz_core::dialogue::{Orchestrator, Provider, ProviderSettings};
use taskviz_core::draw::FrameTiming;
use taskviz_core::Map;
use tokio::sync::mpsc;

use crate::log::{log_path, parse_log, replay_entries, LogEntry, LogError, SessionLog, SessionRecord};
use crate::scenario::{ScenarioProvider, ScenarioScript};
use crate::session::Session;
use crate::wire::{ErrorPayload, GatewayError, MessageType, WireMessage};

/// Milliseconds used to stamp turns.
pub trait Clock: Send + Sync {
    fn now_ms(&self) -> u64;
}

#[derive(Debug, Default)]
pub struct SystemClock;

impl Clock for SystemClock {
    fn now_ms(&self) -> u64 {
        SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)
    }
}

/// A clock that ticks one millisecond per reading.
#[derive(Debug, Default)]
pub struct CountingClock(AtomicU64);

impl Clock for CountingClock {
    fn now_ms(&self) -> u64 {
        self.0.fetch_add(1, Ordering::SeqCst)
    }
}

/// Where each session's provider comes from.
#[derive(Clone)]
pub enum ProviderSource {
    /// A fresh scripted provider per session.
    Scenario(Arc<ScenarioScript>),
    /// One provider shared by all sessions.
    Shared(Arc<dyn Provider>),
}

impl ProviderSource {
    /// `consumed` responses of a script were already used by a replayed
    /// session.
    fn make(&self, consumed: usize) -> Arc<dyn Provider> {
        match self {
            ProviderSource::Scenario(script) => Arc::new(ScenarioProvider::resume(script, consumed)),
            ProviderSource::Shared(p) => p.clone(),
        }
    }
}

#[derive(Clone)]
pub struct HubConfig {
    pub map: Map,
    pub timing: FrameTiming,
    pub provider: ProviderSource,
    pub settings: ProviderSettings,
    /// Logs are written here when set.
    pub data_dir: Option<PathBuf>,
    pub clock: Arc<dyn Clock>,
}

/// Receives the complete response to each message as one batch.
pub type Reply = mpsc::UnboundedSender<Vec<WireMessage>>;

struct Job {
    message: WireMessage,
    reply: Reply,
}

#[derive(Clone)]
pub struct Hub {
    config: Arc<HubConfig>,
    sessions: Arc<Mutex<HashMap<String, mpsc::UnboundedSender<Job>>>>,
    counter: Arc<AtomicU64>,
}

/// An error outside any session.
pub fn detached_error(err: &GatewayError, session: &str, reply_to: Option<u64>) -> WireMessage {
    WireMessage::new(
        MessageType::Error,
        session,
        0,
        ErrorPayload {
            code: err.code().into(),
            message: err.to_string(),
            reply_to,
        },
    )
}

impl Hub {
    pub fn new(config: HubConfig) -> Self {
        Hub {
            config: Arc::new(config),
            sessions: Arc::new(Mutex::new(HashMap::new())),
            counter: Arc::new(AtomicU64::new(0)),
        }
    }

    pub fn config(&self) -> &HubConfig {
        &self.config
    }

    pub fn session_ids(&self) -> Vec<String> {
        let mut ids: Vec<_> = self.sessions.lock().expect("poisoned").keys().cloned().collect();
        ids.sort();
        ids
    }

    /// Routes a client message. Outputs are sent on `reply` in order.
    pub fn dispatch(&self, message: WireMessage, reply: Reply) {
        let sender = match message.kind {
            MessageType::NewSession => self.open(&message),
            MessageType::Replay => self.restore(&message),
            _ => self
                .sessions
                .lock()
                .expect("poisoned")
                .get(&message.session)
                .cloned()
                .ok_or_else(|| GatewayError::UnknownSession(message.session.clone())),
        };
        match sender {
            Ok(tx) => {
                let session = message.session.clone();
                let seq = message.seq;
                if tx.send(Job { message, reply: reply.clone() }).is_err() {
                    let _ = reply.send(vec![detached_error(&GatewayError::UnknownSession(session.clone()), &session, Some(seq))]);
                }
            }
            Err(e) => {
                let _ = reply.send(vec![detached_error(&e, &message.session, Some(message.seq))]);
            }
        }
    }

    fn open(&self, message: &WireMessage) -> Result<mpsc::UnboundedSender<Job>, GatewayError> {
        let mut sessions = self.sessions.lock().expect("poisoned");
        let id = if message.session.is_empty() {
            loop {
                let n = self.counter.fetch_add(1, Ordering::SeqCst) + 1;
                let id = format!("session-{n}");
                if !sessions.contains_key(&id) {
                    break id;
                }
            }
        } else {
            message.session.clone()
        };
        if sessions.contains_key(&id) {
            return Err(GatewayError::SessionExists(id));
        }
        let created_at = self.config.clock.now_ms();
        let log = match &self.config.data_dir {
            Some(dir) => Some(
                SessionLog::create(dir, &id, created_at).map_err(|e| GatewayError::Replay(format!("cannot create log: {e}")))?,
            ),
            None => None,
        };
        let session = Session::new(id.clone(), self.config.map.clone(), self.config.timing);
        let tx = self.spawn(session, log, created_at, 0);
        sessions.insert(id, tx.clone());
        Ok(tx)
    }

    fn restore(&self, message: &WireMessage) -> Result<mpsc::UnboundedSender<Job>, GatewayError> {
        let dir = self
            .config
            .data_dir
            .as_ref()
            .ok_or_else(|| GatewayError::Replay("no data directory configured".into()))?;
        let mut sessions = self.sessions.lock().expect("poisoned");
        if sessions.contains_key(&message.session) {
            return Err(GatewayError::SessionExists(message.session.clone()));
        }
        let path = log_path(dir, &message.session);
        if !path.exists() {
            return Err(GatewayError::UnknownSession(message.session.clone()));
        }
        let failed = |e: LogError| GatewayError::Replay(e.to_string());
        let bytes = std::fs::read(&path).map_err(|e| failed(e.into()))?;
        let entries = parse_log(&bytes).map_err(failed)?;
        let session = replay_entries(&entries, self.config.map.clone(), self.config.timing).map_err(failed)?;
        let created_at = match entries.first() {
            Some(LogEntry::Open { created_at, .. }) => *created_at,
            _ => 0,
        };
        let consumed = entries
            .iter()
            .map(|e| match e {
                LogEntry::Turn { record } => record.attempts.iter().filter(|a| a.raw.is_some()).count(),
                _ => 0,
            })
            .sum();
        let log = SessionLog::reopen(dir, &message.session).map_err(failed)?;
        let tx = self.spawn(session, Some(log), created_at, consumed);
        sessions.insert(message.session.clone(), tx.clone());
        Ok(tx)
    }

    fn spawn(
        &self,
        mut session: Session,
        mut log: Option<SessionLog>,
        created_at: u64,
        consumed: usize,
    ) -> mpsc::UnboundedSender<Job> {
        let (tx, mut rx) = mpsc::unbounded_channel::<Job>();
        let config = self.config.clone();
        let orchestrator = Orchestrator::new(config.provider.make(consumed), config.settings.clone()).with_timing(config.timing);
        tokio::spawn(async move {
            while let Some(Job { message, reply }) = rx.recv().await {
                let at = config.clock.now_ms().saturating_sub(created_at);
                let (outputs, record) = match session.accept(&message) {
                    Err(e) => (vec![session.error(&e, Some(message.seq))], None),
                    Ok(cmd) if cmd.is_turn() => match session.live_turn(&orchestrator, &cmd, at).await {
                        Ok((out, record)) => (out, Some(record)),
                        Err(e) => (vec![session.error(&e, Some(message.seq))], None),
                    },
                    Ok(cmd) => match session.apply_local(cmd) {
                        Ok(out) => (out, None),
                        Err(e) => (vec![session.error(&e, Some(message.seq))], None),
                    },
                };
                if let Some(log) = log.as_mut() {
                    let snapshot = SessionRecord {
                        id: session.id.clone(),
                        created_at,
                        state: session.state.clone(),
                    };
                    if let Err(e) = log.persist_turn(&message, record.as_ref(), &outputs, &snapshot) {
                        tracing::error!(session = %session.id, "persisting failed: {e}");
                    }
                }
                let _ = reply.send(outputs);
            }
        });
        tx
    }

    /// Sends one message and collects its outputs.
    pub async fn request(&self, message: WireMessage) -> Vec<WireMessage> {
        let (tx, mut rx) = mpsc::unbounded_channel();
        self.dispatch(message, tx);
        rx.recv().await.unwrap_or_default()
    }
}
