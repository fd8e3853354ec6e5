use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::domain::{canonicalize_location, DrawCommand, Location, MarkContent};

/// Identity of a drawn element across successive drawings.
///
/// Colour, line type and animation order are deliberately not part of the
/// key: changing them updates an element in place. Links are directional.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElementKey {
    Mark {
        location: Location,
        content: MarkContent,
    },
    Link {
        from: Location,
        to: Location,
        label: String,
    },
}

impl ElementKey {
    pub fn of(cmd: &DrawCommand) -> Self {
        match cmd {
            DrawCommand::Mark(m) => ElementKey::Mark {
                location: m.location,
                content: m.content,
            },
            DrawCommand::Link(l) => ElementKey::Link {
                from: l.from,
                to: l.to,
                label: l.label.clone(),
            },
        }
    }
}

impl fmt::Display for ElementKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementKey::Mark { location, content } => write!(f, "mark|{location}|{content}"),
            ElementKey::Link { from, to, label } => write!(f, "link|{from}|{to}|{label}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed element key `{0}`")]
pub struct KeyParseError(String);

impl FromStr for ElementKey {
    type Err = KeyParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || KeyParseError(s.to_string());
        let (kind, rest) = s.split_once('|').ok_or_else(bad)?;
        match kind {
            "mark" => {
                let (loc, content) = rest.split_once('|').ok_or_else(bad)?;
                Ok(ElementKey::Mark {
                    location: canonicalize_location(loc).map_err(|_| bad())?,
                    content: MarkContent::parse(content).map_err(|_| bad())?,
                })
            }
            "link" => {
                let mut parts = rest.splitn(3, '|');
                let from = parts.next().ok_or_else(bad)?;
                let to = parts.next().ok_or_else(bad)?;
                let label = parts.next().ok_or_else(bad)?;
                Ok(ElementKey::Link {
                    from: canonicalize_location(from).map_err(|_| bad())?,
                    to: canonicalize_location(to).map_err(|_| bad())?,
                    label: label.to_string(),
                })
            }
            _ => Err(bad()),
        }
    }
}

impl Serialize for ElementKey {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ElementKey {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_text_round_trips_with_pipes_in_label() {
        let key = ElementKey::Link {
            from: Location::Gym,
            to: Location::Somewhere,
            label: "a|b".into(),
        };
        assert_eq!(key.to_string(), "link|Gym|Somewhere|a|b");
        assert_eq!(key.to_string().parse::<ElementKey>().unwrap(), key);
        let mark: ElementKey = "mark|Pantry|ask".parse().unwrap();
        assert_eq!(mark.to_string(), "mark|Pantry|ask");
        assert!("arc|Pantry".parse::<ElementKey>().is_err());
    }
}
