use std::collections::HashSet;

use thiserror::Error;

use crate::domain::{DrawCommand, LineType, Location, MarkContent};

use super::ElementKey;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProgramIssue {
    #[error("element {index}: duplicate key {key}")]
    DuplicateKey { index: usize, key: ElementKey },
    #[error("element {index}: dashed line between two fixed places with an unconditional label")]
    DashedMisuse { index: usize },
    #[error("element {index}: animSeq must be at least 1")]
    ZeroAnimSeq { index: usize },
    #[error("element {index}: step numbers start at 1")]
    ZeroStepNumber { index: usize },
}

impl ProgramIssue {
    /// Position of the offending element.
    pub fn index(&self) -> usize {
        match self {
            ProgramIssue::DuplicateKey { index, .. }
            | ProgramIssue::DashedMisuse { index }
            | ProgramIssue::ZeroAnimSeq { index }
            | ProgramIssue::ZeroStepNumber { index } => *index,
        }
    }
}

/// Words that mark a link label as describing a conditional or possible path.
const CONDITION_WORDS: &[&str] = &[
    "if", "when", "whether", "unless", "otherwise", "else", "depending", "depends", "possible",
    "possibly", "maybe", "or", "either", "case", "optional", "variable",
];

/// True when a link label describes a path that only happens under some
/// condition.
pub fn label_is_conditional(label: &str) -> bool {
    if label.contains('?') {
        return true;
    }
    label
        .split(|c: char| !c.is_alphanumeric() && c != '\'')
        .filter(|w| !w.is_empty())
        .any(|w| {
            let lower = w.to_lowercase();
            CONDITION_WORDS.contains(&lower.as_str())
        })
}

/// Checks a parsed program: unique keys, dashed lines only for run-time
/// paths, positive animation and step numbers.
pub fn validate_program<'a>(program: impl IntoIterator<Item = &'a DrawCommand>) -> Vec<ProgramIssue> {
    let mut issues = Vec::new();
    let mut seen = HashSet::new();
    for (index, cmd) in program.into_iter().enumerate() {
        let key = ElementKey::of(cmd);
        if !seen.insert(key.clone()) {
            issues.push(ProgramIssue::DuplicateKey { index, key });
        }
        if cmd.anim_seq() == 0 {
            issues.push(ProgramIssue::ZeroAnimSeq { index });
        }
        match cmd {
            DrawCommand::Mark(m) => {
                if m.content == MarkContent::StepNumber(0) {
                    issues.push(ProgramIssue::ZeroStepNumber { index });
                }
            }
            DrawCommand::Link(l) => {
                let open_end = l.from == Location::Somewhere || l.to == Location::Somewhere;
                if l.line_type == LineType::Dashed && !open_end && !label_is_conditional(&l.label) {
                    issues.push(ProgramIssue::DashedMisuse { index });
                }
            }
        }
    }
    issues
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::draw::parse_draw_script;

    fn issues(src: &str) -> Vec<ProgramIssue> {
        validate_program(&parse_draw_script(src).unwrap())
    }

    #[test]
    fn duplicate_marks() {
        let got = issues(
            "mark(\"Reception area\", \"green\", 1, 1)\nmark(\"Reception area\", \"red\", 1, 2)",
        );
        assert!(matches!(got.as_slice(), [ProgramIssue::DuplicateKey { index: 1, .. }]));
    }

    #[test]
    fn same_place_different_content_is_fine() {
        assert!(issues("mark(\"Pantry\", \"green\", 1, 1)\nmark(\"Pantry\", \"green\", \"ask\", 1)").is_empty());
    }

    #[test]
    fn unconditional_dashed_link_is_misuse() {
        let got = issues(r#"link("Meeting room", "Pantry", "blue", "dashed", "then go to pantry", 2)"#);
        assert_eq!(got, vec![ProgramIssue::DashedMisuse { index: 0 }]);
    }

    #[test]
    fn dashed_link_from_somewhere_is_valid() {
        assert!(issues(r#"link("somewhere", "Leader's office", "blue", "dashed", "bring them", 2)"#).is_empty());
    }

    #[test]
    fn dashed_link_with_conditional_label_is_valid() {
        assert!(issues(r#"link("Meeting room", "Pantry", "blue", "dashed", "if not ready", 2)"#).is_empty());
        assert!(issues(r#"link("Meeting room", "Pantry", "blue", "dashed", "ready?", 2)"#).is_empty());
    }

    #[test]
    fn condition_words_match_whole_words() {
        assert!(label_is_conditional("go there or wait"));
        assert!(!label_is_conditional("escort the visitor"));
        assert!(!label_is_conditional("then go to pantry"));
        assert!(!label_is_conditional("Iffy floor"));
    }

    #[test]
    fn direction_distinguishes_links() {
        assert!(issues(
            "link(\"Gym\", \"Pantry\", \"red\", \"solid\", \"x\", 1)\nlink(\"Pantry\", \"Gym\", \"red\", \"solid\", \"x\", 1)"
        )
        .is_empty());
    }
}
