use serde::{Deserialize, Serialize};

use super::{closed_enum, Color, FeedbackType, LineType, Location, MarkContent};

closed_enum! {
    /// Presentation mode for a drawing.
    pub enum DrawMode("draw mode") {
        /// Animate only what changed since the last drawing.
        Feedback => "feedback",
        /// Narrate the task step by step, highlighting each step's elements.
        Confirm => "confirm",
        /// Show the current task flow statically.
        None => "none",
    }
}

/// A marker placed on a location.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Mark {
    pub location: Location,
    pub color: Color,
    pub content: MarkContent,
    pub anim_seq: u32,
    #[serde(default)]
    pub feedback: FeedbackType,
}

/// A directed arrow between two locations.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Link {
    pub from: Location,
    pub to: Location,
    pub color: Color,
    pub line_type: LineType,
    pub label: String,
    pub anim_seq: u32,
    #[serde(default)]
    pub feedback: FeedbackType,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DrawCommand {
    Mark(Mark),
    Link(Link),
}

impl DrawCommand {
    pub fn feedback(&self) -> FeedbackType {
        match self {
            DrawCommand::Mark(m) => m.feedback,
            DrawCommand::Link(l) => l.feedback,
        }
    }

    pub fn set_feedback(&mut self, feedback: FeedbackType) {
        match self {
            DrawCommand::Mark(m) => m.feedback = feedback,
            DrawCommand::Link(l) => l.feedback = feedback,
        }
    }

    pub fn with_feedback(mut self, feedback: FeedbackType) -> Self {
        self.set_feedback(feedback);
        self
    }

    pub fn anim_seq(&self) -> u32 {
        match self {
            DrawCommand::Mark(m) => m.anim_seq,
            DrawCommand::Link(l) => l.anim_seq,
        }
    }

    pub fn color(&self) -> Color {
        match self {
            DrawCommand::Mark(m) => m.color,
            DrawCommand::Link(l) => l.color,
        }
    }
}

/// An ordered list of draw commands, as parsed from a draw script.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DrawProgram(pub Vec<DrawCommand>);

impl DrawProgram {
    pub fn new(commands: Vec<DrawCommand>) -> Self {
        DrawProgram(commands)
    }

    pub fn commands(&self) -> &[DrawCommand] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, DrawCommand> {
        self.0.iter()
    }
}

impl FromIterator<DrawCommand> for DrawProgram {
    fn from_iter<I: IntoIterator<Item = DrawCommand>>(iter: I) -> Self {
        DrawProgram(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a DrawProgram {
    type Item = &'a DrawCommand;
    type IntoIter = std::slice::Iter<'a, DrawCommand>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// One narrated step of a drawing. `seq` names the `animSeq` of the
/// elements that belong to this step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceItem {
    pub seq: String,
    pub text: String,
    #[serde(default)]
    pub feedback: bool,
}

impl SequenceItem {
    pub fn new(seq: impl Into<String>, text: impl Into<String>) -> Self {
        SequenceItem {
            seq: seq.into(),
            text: text.into(),
            feedback: false,
        }
    }

    /// The animation sequence number this item refers to, if numeric.
    pub fn anim_seq(&self) -> Option<u32> {
        self.seq.trim().parse().ok()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DrawConfig {
    pub mode: DrawMode,
    #[serde(default)]
    pub sequence: Vec<SequenceItem>,
}

impl DrawConfig {
    pub fn new(mode: DrawMode, sequence: Vec<SequenceItem>) -> Self {
        DrawConfig { mode, sequence }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Icon;

    #[test]
    fn wire_field_names_are_lower_camel_case() {
        let cmd = DrawCommand::Link(Link {
            from: Location::ReceptionArea,
            to: Location::Somewhere,
            color: Color::Blue,
            line_type: LineType::Dashed,
            label: "if busy".into(),
            anim_seq: 2,
            feedback: FeedbackType::Add,
        });
        let json = serde_json::to_string(&cmd).unwrap();
        assert_eq!(
            json,
            r#"{"kind":"link","from":"ReceptionArea","to":"Somewhere","color":"blue","lineType":"dashed","label":"if busy","animSeq":2,"feedback":"add"}"#
        );
        let back: DrawCommand = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cmd);
    }

    #[test]
    fn mark_feedback_defaults_to_none() {
        let m: DrawCommand = serde_json::from_str(
            r#"{"kind":"mark","location":"Pantry","color":"red","content":"wakeup","animSeq":1}"#,
        )
        .unwrap();
        assert_eq!(m.feedback(), FeedbackType::None);
        assert!(matches!(m, DrawCommand::Mark(Mark { content: MarkContent::Icon(Icon::Wakeup), .. })));
    }

    #[test]
    fn sequence_item_anim_seq() {
        assert_eq!(SequenceItem::new(" 3", "x").anim_seq(), Some(3));
        assert_eq!(SequenceItem::new("intro", "x").anim_seq(), None);
    }
}
