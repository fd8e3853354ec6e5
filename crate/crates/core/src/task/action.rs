use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::domain::Location;

/// Predicate evaluated by a branch on a stored variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Condition {
    /// The variable's text contains `keyword`, ignoring case.
    Contains { var: String, keyword: String },
    IsTrue { var: String },
    IsFalse { var: String },
}

impl Condition {
    pub fn var(&self) -> &str {
        match self {
            Condition::Contains { var, .. } | Condition::IsTrue { var } | Condition::IsFalse { var } => var,
        }
    }
}

/// One robot behaviour.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Action {
    /// Wait for the activation keyword.
    Wake { keyword: String },
    Goto { location: Location },
    /// Speak a template; `{var}` slots are filled at run time.
    Say { template: String },
    /// Ask a question and store the reply.
    Ask { template: String, store: String },
    /// Look for a person for up to five seconds and store whether one was seen.
    Detect { store: String },
    Branch {
        condition: Condition,
        then_steps: Vec<Action>,
        else_steps: Vec<Action>,
    },
}

impl Action {
    pub fn goto(location: Location) -> Self {
        Action::Goto { location }
    }

    pub fn say(template: impl Into<String>) -> Self {
        Action::Say {
            template: template.into(),
        }
    }

    pub fn ask(template: impl Into<String>, store: impl Into<String>) -> Self {
        Action::Ask {
            template: template.into(),
            store: store.into(),
        }
    }

    pub fn detect(store: impl Into<String>) -> Self {
        Action::Detect { store: store.into() }
    }

    /// The variable this action binds, if any.
    pub fn stores(&self) -> Option<&str> {
        match self {
            Action::Ask { store, .. } | Action::Detect { store } => Some(store),
            _ => None,
        }
    }
}

/// An executable task: the activation keyword followed by the body.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RobotProgram {
    pub wake: String,
    pub body: Vec<Action>,
}

impl RobotProgram {
    pub fn new(wake: impl Into<String>, body: Vec<Action>) -> Self {
        RobotProgram {
            wake: wake.into(),
            body,
        }
    }

    /// The program as a flat action list, wake first.
    pub fn to_actions(&self) -> Vec<Action> {
        let mut out = Vec::with_capacity(self.body.len() + 1);
        out.push(Action::Wake {
            keyword: self.wake.clone(),
        });
        out.extend(self.body.iter().cloned());
        out
    }
}

// Programs travel as IR text inside JSON documents.
impl Serialize for RobotProgram {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::serialize_ir(self))
    }
}

impl<'de> Deserialize<'de> for RobotProgram {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        super::parse_ir(&text).map_err(serde::de::Error::custom)
    }
}

/// Lowercase identifier: `[a-z_][a-z0-9_]*`.
pub fn is_var_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase() || c == '_')
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

/// Variable names referenced by `{var}` slots, in order of appearance.
/// Braces that do not enclose an identifier are plain text.
pub fn template_vars(template: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        let after = &rest[open + 1..];
        match after.find('}') {
            Some(close) => {
                let name = &after[..close];
                if is_var_name(name) {
                    out.push(name);
                    rest = &after[close + 1..];
                } else {
                    rest = after;
                }
            }
            None => break,
        }
    }
    out
}
