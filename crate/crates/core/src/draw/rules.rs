//! The per-mode drawing rules applied to a provider's candidate drawing.

use std::collections::BTreeSet;

use crate::domain::{DrawConfig, DrawMode, DrawProgram, FeedbackType, SequenceItem};

use super::diff::{diff_programs, strip_feedback, without_deleted};

/// A drawing after the mode rules have been applied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuledDrawing {
    pub program: DrawProgram,
    pub config: DrawConfig,
    /// Confirm or feedback mode was requested without a previous drawing;
    /// the previous drawing was treated as empty.
    pub missing_last: bool,
}

/// Applies the drawing rules for `mode`.
///
/// * `none`: the candidate with every annotation removed and every
///   sequence item's feedback flag cleared.
/// * `confirm`: the previous drawing minus its deleted elements, with
///   annotations removed, narrated by the candidate's sequence texts.
/// * `feedback`: the candidate diffed against the previous drawing; sequence
///   items whose elements changed are flagged.
pub fn apply_draw_rules(
    mode: DrawMode,
    last: Option<(&DrawProgram, &DrawConfig)>,
    candidate: (&DrawProgram, &DrawConfig),
) -> RuledDrawing {
    let (cand_program, cand_config) = candidate;
    match mode {
        DrawMode::None => RuledDrawing {
            program: strip_feedback(cand_program),
            config: DrawConfig::new(DrawMode::None, unflagged(&cand_config.sequence)),
            missing_last: false,
        },
        DrawMode::Confirm => {
            let (base, missing_last) = match last {
                Some((program, _)) => (program, false),
                None => (cand_program, true),
            };
            let sequence = if cand_config.sequence.is_empty() {
                last.map(|(_, c)| unflagged(&c.sequence)).unwrap_or_default()
            } else {
                unflagged(&cand_config.sequence)
            };
            RuledDrawing {
                program: strip_feedback(&without_deleted(base)),
                config: DrawConfig::new(DrawMode::Confirm, sequence),
                missing_last,
            }
        }
        DrawMode::Feedback => {
            let empty = DrawProgram::default();
            let previous = last.map(|(p, _)| strip_feedback(&without_deleted(p)));
            let missing_last = previous.is_none();
            let program = diff_programs(previous.as_ref().unwrap_or(&empty), &strip_feedback(cand_program));
            let changed: BTreeSet<u32> = program
                .iter()
                .filter(|c| c.feedback() != FeedbackType::None)
                .map(|c| c.anim_seq())
                .collect();
            let sequence = cand_config
                .sequence
                .iter()
                .map(|item| SequenceItem {
                    feedback: missing_last || item.anim_seq().is_some_and(|s| changed.contains(&s)),
                    ..item.clone()
                })
                .collect();
            RuledDrawing {
                program,
                config: DrawConfig::new(DrawMode::Feedback, sequence),
                missing_last,
            }
        }
    }
}

fn unflagged(sequence: &[SequenceItem]) -> Vec<SequenceItem> {
    sequence
        .iter()
        .map(|item| SequenceItem {
            feedback: false,
            ..item.clone()
        })
        .collect()
}
