//! Shared vocabulary: places, draw commands, dialogue outputs and phases.
//!
//! Every closed enumeration parses case-insensitively with surrounding
//! whitespace ignored and serializes to a single canonical spelling.

mod draw;
mod location;
mod output;
mod phase;
mod vocab;

use thiserror::Error;

pub use draw::{DrawCommand, DrawConfig, DrawMode, DrawProgram, Link, Mark, SequenceItem};
pub use location::{canonicalize_location, Location, LOCATION_ALIASES};
pub use output::{OutputState, RobotOutput};
pub use phase::DialoguePhase;
pub use vocab::{Color, FeedbackType, Icon, LineType, MarkContent};

/// A string that is not a member of a closed enumeration.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown {kind} `{value}`")]
pub struct EnumError {
    pub kind: &'static str,
    pub value: String,
}

/// Declares a closed string enumeration with case-insensitive parsing and
/// serde support through its canonical spelling.
macro_rules! closed_enum {
    (
        $(#[$meta:meta])*
        $vis:vis enum $name:ident ($kind:literal) {
            $($(#[$vmeta:meta])* $variant:ident => $text:literal),+ $(,)?
        }
    ) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        $vis enum $name {
            $($(#[$vmeta])* $variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }
        }

        impl ::std::fmt::Display for $name {
            fn fmt(&self, f: &mut ::std::fmt::Formatter<'_>) -> ::std::fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl ::std::str::FromStr for $name {
            type Err = $crate::domain::EnumError;

            fn from_str(raw: &str) -> Result<Self, Self::Err> {
                let trimmed = raw.trim();
                $(
                    if trimmed.eq_ignore_ascii_case($text) {
                        return Ok($name::$variant);
                    }
                )+
                Err($crate::domain::EnumError { kind: $kind, value: raw.to_string() })
            }
        }

        impl ::serde::Serialize for $name {
            fn serialize<S: ::serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(self.as_str())
            }
        }

        impl<'de> ::serde::Deserialize<'de> for $name {
            fn deserialize<D: ::serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let raw = String::deserialize(d)?;
                raw.parse().map_err(::serde::de::Error::custom)
            }
        }
    };
}

pub(crate) use closed_enum;
