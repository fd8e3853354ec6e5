//! Compiles a drawing into time-stamped render frames.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{DrawCommand, DrawConfig, DrawMode, DrawProgram, FeedbackType};
use crate::scalar::Scalar;

use super::ElementKey;

/// Animation timing. Frame times are integer milliseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FrameTiming {
    /// Total fade-in/fade-out duration in feedback mode.
    pub fade_ms: u64,
    /// Number of fade steps after the base frame.
    pub fade_ticks: u32,
    /// How long each narrated step stays on screen in confirm mode.
    pub dwell_ms: u64,
}

impl Default for FrameTiming {
    fn default() -> Self {
        FrameTiming {
            fade_ms: 600,
            fade_ticks: 6,
            dwell_ms: 1500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct FrameElement<S> {
    pub key: ElementKey,
    pub opacity: S,
    pub highlight: bool,
    /// The drawn element itself, so a frame can be rendered on its own.
    pub element: DrawCommand,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct Frame<S> {
    /// Milliseconds from the start of the presentation.
    pub t: u64,
    pub caption: Option<String>,
    pub elements: Vec<FrameElement<S>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct FrameList<S> {
    pub frames: Vec<Frame<S>>,
}

impl<S> FrameList<S> {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrameError {
    #[error("sequence item `{0}` matches no drawn element")]
    SeqMismatch(String),
    #[error("fade needs at least one tick and one millisecond per tick")]
    BadTiming,
}

fn element<S: Scalar>(cmd: &DrawCommand, opacity: S, highlight: bool) -> FrameElement<S> {
    FrameElement {
        key: ElementKey::of(cmd),
        opacity,
        highlight,
        element: cmd.clone(),
    }
}

/// Compiles a drawing into frames according to its config mode.
///
/// * `none`: a single frame, everything fully visible.
/// * `feedback`: a base frame followed by `fade_ticks` steps in which added
///   elements fade in and deleted ones fade out; deleted elements are gone
///   from the final frame. Changed elements are highlighted.
/// * `confirm`: one frame per sequence item, `dwell_ms` apart, captioned with
///   the item's text and highlighting the elements of that step.
pub fn compile_frames<S: Scalar>(
    program: &DrawProgram,
    config: &DrawConfig,
    timing: &FrameTiming,
) -> Result<FrameList<S>, FrameError> {
    let frames = match config.mode {
        DrawMode::None => vec![Frame {
            t: 0,
            caption: None,
            elements: program
                .iter()
                .filter(|c| c.feedback() != FeedbackType::Del)
                .map(|c| element(c, S::one(), false))
                .collect(),
        }],
        DrawMode::Feedback => feedback_frames(program, timing)?,
        DrawMode::Confirm => confirm_frames(program, config, timing)?,
    };
    Ok(FrameList { frames })
}

fn feedback_frames<S: Scalar>(program: &DrawProgram, timing: &FrameTiming) -> Result<Vec<Frame<S>>, FrameError> {
    let ticks = timing.fade_ticks;
    if ticks == 0 || timing.fade_ms < u64::from(ticks) {
        return Err(FrameError::BadTiming);
    }
    let mut frames = Vec::with_capacity(ticks as usize + 1);
    for k in 0..=ticks {
        let progress = S::ratio(k, ticks);
        let last = k == ticks;
        let elements = program
            .iter()
            .filter(|c| !(last && c.feedback() == FeedbackType::Del))
            .map(|c| match c.feedback() {
                FeedbackType::None => element(c, S::one(), false),
                FeedbackType::Add => element(c, progress, true),
                FeedbackType::Del => element(c, S::one() - progress, true),
            })
            .collect();
        frames.push(Frame {
            t: timing.fade_ms * u64::from(k) / u64::from(ticks),
            caption: None,
            elements,
        });
    }
    Ok(frames)
}

fn confirm_frames<S: Scalar>(
    program: &DrawProgram,
    config: &DrawConfig,
    timing: &FrameTiming,
) -> Result<Vec<Frame<S>>, FrameError> {
    let visible: Vec<&DrawCommand> = program.iter().filter(|c| c.feedback() != FeedbackType::Del).collect();
    let mut frames = Vec::with_capacity(config.sequence.len());
    for (i, item) in config.sequence.iter().enumerate() {
        let seq = item.anim_seq();
        let in_step = |c: &DrawCommand| seq == Some(c.anim_seq());
        if !visible.iter().any(|c| in_step(c)) {
            return Err(FrameError::SeqMismatch(item.seq.clone()));
        }
        frames.push(Frame {
            t: timing.dwell_ms * i as u64,
            caption: Some(item.text.clone()),
            elements: visible.iter().map(|c| element(c, S::one(), in_step(c))).collect(),
        });
    }
    Ok(frames)
}
