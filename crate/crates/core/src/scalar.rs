//! Floating-point scalar abstraction.
//!
//! Map geometry, travel kinematics and animation opacities are written once
//! against [`Scalar`] and instantiated for `f32` or `f64`. Virtual time is
//! kept in integer microseconds regardless of the scalar, so timing rules
//! stay exact.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point type usable for geometry and opacities: `f32` or `f64`.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`, used for constants and parsed input.
    fn from_f64_lossy(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).unwrap_or_else(Self::nan)
    }

    /// Widening conversion used at formatting and clock boundaries.
    fn to_f64_lossy(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    /// `num / den` computed in the scalar type.
    fn ratio(num: u32, den: u32) -> Self {
        Self::from_f64_lossy(f64::from(num)) / Self::from_f64_lossy(f64::from(den))
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
