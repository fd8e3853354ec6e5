//! Core of a visual-aid task communication system for service robots.
//!
//! * [`domain`]: shared vocabulary
//! * [`dialogue`]: intent rules, output validation and turn processing
//! * [`draw`]: the drawing script, diffing, mode rules, frames and SVG
//! * [`task`]: robot programs, the step grammar and the IR text form
//! * [`sim`]: map geometry and the discrete-event interpreter
//!
//! Geometry and opacities are generic over [`Scalar`] (`f32` or `f64`);
//! the aliases below fix them to `f64`, with `*32` variants for `f32`.

pub mod dialogue;
pub mod domain;
pub mod draw;
pub mod scalar;
pub mod sim;
pub mod task;

pub use scalar::Scalar;

pub type Map = sim::MapGeometry<f64>;
pub type Map32 = sim::MapGeometry<f32>;
pub type Frames = draw::FrameList<f64>;
pub type Frames32 = draw::FrameList<f32>;
pub type Frame = draw::Frame<f64>;
pub type Interpreter = sim::Interpreter<f64>;
