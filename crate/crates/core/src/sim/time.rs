//! Virtual time in whole microseconds.

use serde::{Deserialize, Deserializer, Serializer};

pub type Micros = u64;

pub const MICROS_PER_SECOND: Micros = 1_000_000;

/// How long a person search waits before giving up.
pub const DETECT_WINDOW: Micros = 5 * MICROS_PER_SECOND;

/// Converts seconds to microseconds, rounding to the nearest one.
/// Negative and non-finite inputs yield `None`.
pub fn micros_from_secs(secs: f64) -> Option<Micros> {
    (secs.is_finite() && secs >= 0.0).then(|| (secs * MICROS_PER_SECOND as f64).round() as Micros)
}

pub fn secs_from_micros(t: Micros) -> f64 {
    t as f64 / MICROS_PER_SECOND as f64
}

/// A manually advanced clock.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct VirtualClock {
    now: Micros,
}

impl VirtualClock {
    pub fn now(&self) -> Micros {
        self.now
    }

    pub fn advance(&mut self, by: Micros) {
        self.now += by;
    }

    /// Moves the clock forward to `t`; earlier times leave it unchanged.
    pub fn advance_to(&mut self, t: Micros) {
        self.now = self.now.max(t);
    }
}

/// Serde adapter: microseconds in memory, seconds on the wire.
pub mod as_secs {
    use super::*;

    pub fn serialize<S: Serializer>(t: &Micros, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(secs_from_micros(*t))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Micros, D::Error> {
        let secs = f64::deserialize(d)?;
        micros_from_secs(secs).ok_or_else(|| serde::de::Error::custom(format!("bad time {secs}")))
    }
}
