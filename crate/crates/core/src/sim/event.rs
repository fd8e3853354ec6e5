use serde::{Deserialize, Serialize};

use crate::domain::Location;

use super::time::{as_secs, Micros};

/// Something that happens to the robot while a program is under test.
/// A missing `t` means "as soon as possible".
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum SimEvent {
    WakeUttered {
        keyword: String,
        #[serde(with = "as_secs", default)]
        t: Micros,
    },
    Reply {
        text: String,
        #[serde(with = "as_secs", default)]
        t: Micros,
    },
    HumanPresent {
        #[serde(with = "as_secs", default)]
        t: Micros,
    },
}

impl SimEvent {
    pub fn t(&self) -> Micros {
        match self {
            SimEvent::WakeUttered { t, .. } | SimEvent::Reply { t, .. } | SimEvent::HumanPresent { t } => *t,
        }
    }

    pub fn with_t(mut self, at: Micros) -> Self {
        match &mut self {
            SimEvent::WakeUttered { t, .. } | SimEvent::Reply { t, .. } | SimEvent::HumanPresent { t } => *t = at,
        }
        self
    }

    pub fn wake(keyword: impl Into<String>, t: Micros) -> Self {
        SimEvent::WakeUttered {
            keyword: keyword.into(),
            t,
        }
    }

    pub fn reply(text: impl Into<String>, t: Micros) -> Self {
        SimEvent::Reply { text: text.into(), t }
    }

    pub fn human(t: Micros) -> Self {
        SimEvent::HumanPresent { t }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arm {
    Then,
    Else,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum TraceKind {
    Arrived { location: Location },
    Spoke { text: String },
    Asked { text: String },
    GotReply { var: String, text: String },
    Detected { var: String, value: bool },
    BranchTaken { arm: Arm },
    Finished,
}

/// One timestamped execution record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEntry {
    #[serde(with = "as_secs")]
    pub t: Micros,
    #[serde(flatten)]
    pub kind: TraceKind,
}

pub type Trace = Vec<TraceEntry>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wire_shapes() {
        let e: SimEvent = serde_json::from_str(r#"{"kind":"humanPresent","t":3.2}"#).unwrap();
        assert_eq!(e, SimEvent::human(3_200_000));
        let e: SimEvent = serde_json::from_str(r#"{"kind":"reply","text":"yes"}"#).unwrap();
        assert_eq!(e, SimEvent::reply("yes", 0));
        let entry = TraceEntry {
            t: 5_000_000,
            kind: TraceKind::Detected {
                var: "seen".into(),
                value: false,
            },
        };
        assert_eq!(
            serde_json::to_string(&entry).unwrap(),
            r#"{"t":5.0,"kind":"detected","var":"seen","value":false}"#
        );
        let back: TraceEntry = serde_json::from_str(&serde_json::to_string(&entry).unwrap()).unwrap();
        assert_eq!(back, entry);
    }
}
