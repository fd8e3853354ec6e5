//! The drawing engine: script parsing, validation, diffing, mode rules,
//! frame compilation and SVG rendering.

mod diff;
mod frames;
mod key;
mod rules;
mod script;
mod svg;
mod synth;
mod validate;

pub use diff::{diff_programs, keys_with, strip_feedback, without_deleted};
pub use frames::{compile_frames, Frame, FrameElement, FrameError, FrameList, FrameTiming};
pub use key::{ElementKey, KeyParseError};
pub use rules::{apply_draw_rules, RuledDrawing};
pub use script::{parse_draw_script, serialize_draw_program, ScriptError, ScriptErrorKind};
pub use svg::{color_hex, render_svg, SvgError};
pub use synth::synthesize_drawing;
pub use validate::{label_is_conditional, validate_program, ProgramIssue};
