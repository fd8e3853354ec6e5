use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{closed_enum, EnumError};

closed_enum! {
    /// Palette available to marks and links.
    pub enum Color("color") {
        White => "white",
        Green => "green",
        Yellow => "yellow",
        Blue => "blue",
        Red => "red",
        Pink => "pink",
        Gray => "gray",
    }
}

closed_enum! {
    /// Behaviour glyph shown inside a mark.
    pub enum Icon("icon") {
        Speak => "speak",
        Ask => "ask",
        Wakeup => "wakeup",
        HumanDetect => "humanDetect",
    }
}

closed_enum! {
    /// Change annotation carried by an element in feedback mode.
    pub enum FeedbackType("feedback type") {
        None => "none",
        Add => "add",
        Del => "del",
    }
}

closed_enum! {
    pub enum LineType("line type") {
        Solid => "solid",
        /// A path whose start or destination is decided at run time.
        Dashed => "dashed",
    }
}

impl Default for FeedbackType {
    fn default() -> Self {
        FeedbackType::None
    }
}

/// What a mark displays: its position in the task order, or a behaviour icon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MarkContent {
    StepNumber(u32),
    Icon(Icon),
}

impl MarkContent {
    /// Parses `"3"` as a step number and `"speak"` as an icon. Step
    /// numbers start at 1.
    pub fn parse(raw: &str) -> Result<Self, EnumError> {
        let trimmed = raw.trim();
        if !trimmed.is_empty() && trimmed.bytes().all(|b| b.is_ascii_digit()) {
            return match trimmed.parse::<u32>() {
                Ok(n) if n >= 1 => Ok(MarkContent::StepNumber(n)),
                _ => Err(EnumError {
                    kind: "mark content",
                    value: raw.to_string(),
                }),
            };
        }
        Icon::from_str(trimmed)
            .map(MarkContent::Icon)
            .map_err(|_| EnumError {
                kind: "mark content",
                value: raw.to_string(),
            })
    }
}

impl fmt::Display for MarkContent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MarkContent::StepNumber(n) => write!(f, "{n}"),
            MarkContent::Icon(icon) => f.write_str(icon.as_str()),
        }
    }
}

impl Serialize for MarkContent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            MarkContent::StepNumber(n) => s.serialize_u32(*n),
            MarkContent::Icon(icon) => s.serialize_str(icon.as_str()),
        }
    }
}

impl<'de> Deserialize<'de> for MarkContent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u64),
            Text(String),
        }
        let text = match Raw::deserialize(d)? {
            Raw::Num(n) => n.to_string(),
            Raw::Text(t) => t,
        };
        MarkContent::parse(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn closure<T>(all: &[T])
    where
        T: Copy + PartialEq + fmt::Debug + fmt::Display + FromStr,
    {
        for v in all {
            let parsed: Result<T, _> = v.to_string().parse();
            assert!(matches!(parsed, Ok(p) if p == *v), "{v} did not round trip");
            let upper: Result<T, _> = format!("  {}  ", v.to_string().to_uppercase()).parse();
            assert!(matches!(upper, Ok(p) if p == *v));
        }
    }

    #[test]
    fn enumerations_are_closed() {
        closure(Color::ALL);
        closure(Icon::ALL);
        closure(FeedbackType::ALL);
        closure(LineType::ALL);
        assert!("purple".parse::<Color>().is_err());
        assert!("orange".parse::<Color>().is_err());
        assert!("dotted".parse::<LineType>().is_err());
        assert!("move".parse::<FeedbackType>().is_err());
        assert!("circle".parse::<Icon>().is_err());
    }

    #[test]
    fn mark_content_numbers_and_icons() {
        assert_eq!(MarkContent::parse("1").unwrap(), MarkContent::StepNumber(1));
        assert_eq!(MarkContent::parse(" 12 ").unwrap(), MarkContent::StepNumber(12));
        assert_eq!(
            MarkContent::parse("humandetect").unwrap(),
            MarkContent::Icon(Icon::HumanDetect)
        );
        assert!(MarkContent::parse("0").is_err());
        assert!(MarkContent::parse("-1").is_err());
        assert!(MarkContent::parse("note").is_err());
    }

    #[test]
    fn mark_content_json() {
        let n: MarkContent = serde_json::from_str("3").unwrap();
        assert_eq!(n, MarkContent::StepNumber(3));
        let icon: MarkContent = serde_json::from_str("\"ask\"").unwrap();
        assert_eq!(serde_json::to_string(&icon).unwrap(), "\"ask\"");
        assert!(serde_json::from_str::<MarkContent>("0").is_err());
    }
}
