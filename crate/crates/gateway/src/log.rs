//! Append-only JSONL session logs and their replay.

use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use taskviz_core::dialogue::{SessionState, TurnRecord};
use taskviz_core::draw::FrameTiming;
use taskviz_core::Map;
use thiserror::Error;

use crate::session::Session;
use crate::wire::WireMessage;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum LogEntry {
    #[serde(rename_all = "camelCase")]
    Open { session: String, created_at: u64 },
    In { message: WireMessage },
    /// The provider exchange behind the preceding turn message.
    Turn { record: TurnRecord },
    Out { message: WireMessage },
}

#[derive(Debug, Error)]
pub enum LogError {
    #[error("corrupt log at byte {offset}: {reason}")]
    CorruptLog { offset: usize, reason: String },
    #[error("replay diverged at entry {entry}: {reason}")]
    Diverged { entry: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn corrupt(offset: usize, reason: impl Into<String>) -> LogError {
    LogError::CorruptLog {
        offset,
        reason: reason.into(),
    }
}

/// Parses a log. Every record is one JSON object terminated by a newline;
/// a missing terminator means the log was cut short.
pub fn parse_log(bytes: &[u8]) -> Result<Vec<LogEntry>, LogError> {
    let mut entries = Vec::new();
    let mut offset = 0;
    while offset < bytes.len() {
        let rest = &bytes[offset..];
        let Some(end) = rest.iter().position(|b| *b == b'\n') else {
            return Err(corrupt(offset, "truncated record"));
        };
        let line = &rest[..end];
        if !line.iter().all(u8::is_ascii_whitespace) {
            let entry = serde_json::from_slice(line).map_err(|e| corrupt(offset, e.to_string()))?;
            entries.push(entry);
        }
        offset += end + 1;
    }
    Ok(entries)
}

/// Rebuilds a session from its log, checking that every recomputed server
/// message equals the logged one. An empty log yields a fresh session.
pub fn replay_entries(entries: &[LogEntry], map: Map, timing: FrameTiming) -> Result<Session, LogError> {
    let id = match entries.first() {
        Some(LogEntry::Open { session, .. }) => session.clone(),
        Some(_) => {
            return Err(LogError::Diverged {
                entry: 0,
                reason: "log does not start with an open record".into(),
            })
        }
        None => String::new(),
    };
    let mut session = Session::new(id, map, timing);
    let mut expected: Vec<WireMessage> = Vec::new();
    let mut i = 1;
    let diverged = |entry: usize, reason: String| LogError::Diverged { entry, reason };
    while i < entries.len() {
        let LogEntry::In { message } = &entries[i] else {
            return Err(diverged(i, "expected a client message".into()));
        };
        let at = i;
        i += 1;
        let produced = match session.accept(message) {
            Err(e) => vec![session.error(&e, Some(message.seq))],
            Ok(cmd) if cmd.is_turn() => {
                let Some(LogEntry::Turn { record }) = entries.get(i) else {
                    return Err(diverged(i, "turn message without a turn record".into()));
                };
                i += 1;
                session.recorded_turn(record).unwrap_or_else(|e| vec![session.error(&e, Some(message.seq))])
            }
            Ok(cmd) => session.apply_local(cmd).unwrap_or_else(|e| vec![session.error(&e, Some(message.seq))]),
        };
        expected.clear();
        while let Some(LogEntry::Out { message }) = entries.get(i) {
            expected.push(message.clone());
            i += 1;
        }
        if produced != expected {
            return Err(diverged(at, format!("{} messages recomputed, {} logged", produced.len(), expected.len())));
        }
    }
    Ok(session)
}

pub fn replay_file(path: &Path, map: Map, timing: FrameTiming) -> Result<Session, LogError> {
    let bytes = std::fs::read(path)?;
    replay_entries(&parse_log(&bytes)?, map, timing)
}

/// Writer for one session's log plus its state snapshot.
#[derive(Debug)]
pub struct SessionLog {
    dir: PathBuf,
    id: String,
    out: BufWriter<File>,
}

/// What the snapshot file holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionRecord {
    pub id: String,
    pub created_at: u64,
    pub state: SessionState,
}

pub fn log_path(dir: &Path, id: &str) -> PathBuf {
    dir.join(format!("{id}.jsonl"))
}

pub fn snapshot_path(dir: &Path, id: &str) -> PathBuf {
    dir.join(format!("{id}.state.json"))
}

impl SessionLog {
    /// Starts a new log. Fails if one already exists for `id`.
    pub fn create(dir: &Path, id: &str, created_at: u64) -> Result<Self, LogError> {
        std::fs::create_dir_all(dir)?;
        let file = OpenOptions::new().create_new(true).append(true).open(log_path(dir, id))?;
        let mut log = SessionLog {
            dir: dir.to_path_buf(),
            id: id.to_string(),
            out: BufWriter::new(file),
        };
        log.append(&LogEntry::Open {
            session: id.to_string(),
            created_at,
        })?;
        log.flush()?;
        Ok(log)
    }

    /// Continues an existing log.
    pub fn reopen(dir: &Path, id: &str) -> Result<Self, LogError> {
        let file = OpenOptions::new().append(true).open(log_path(dir, id))?;
        Ok(SessionLog {
            dir: dir.to_path_buf(),
            id: id.to_string(),
            out: BufWriter::new(file),
        })
    }

    pub fn append(&mut self, entry: &LogEntry) -> Result<(), LogError> {
        serde_json::to_writer(&mut self.out, entry).map_err(std::io::Error::from)?;
        self.out.write_all(b"\n")?;
        Ok(())
    }

    pub fn flush(&mut self) -> Result<(), LogError> {
        self.out.flush()?;
        Ok(())
    }

    /// Records one handled message with its outputs, then rewrites the
    /// snapshot.
    pub fn persist_turn(
        &mut self,
        incoming: &WireMessage,
        record: Option<&TurnRecord>,
        outgoing: &[WireMessage],
        snapshot: &SessionRecord,
    ) -> Result<(), LogError> {
        self.append(&LogEntry::In {
            message: incoming.clone(),
        })?;
        if let Some(record) = record {
            self.append(&LogEntry::Turn { record: record.clone() })?;
        }
        for m in outgoing {
            self.append(&LogEntry::Out { message: m.clone() })?;
        }
        self.flush()?;
        let tmp = self.dir.join(format!("{}.state.json.tmp", self.id));
        std::fs::write(&tmp, serde_json::to_vec_pretty(snapshot).map_err(std::io::Error::from)?)?;
        std::fs::rename(tmp, snapshot_path(&self.dir, &self.id))?;
        Ok(())
    }
}
