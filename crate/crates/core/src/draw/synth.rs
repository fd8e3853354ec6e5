//! A plain drawing derived directly from task steps, used when a provider
//! supplies no usable drawing of its own.

use std::collections::HashSet;

use crate::domain::{
    Color, DrawCommand, DrawConfig, DrawMode, DrawProgram, Icon, LineType, Link, Location, Mark, MarkContent,
    SequenceItem,
};
use crate::task::{parse_step, Action, Condition};

use super::ElementKey;

struct Sketch {
    commands: Vec<DrawCommand>,
    keys: HashSet<ElementKey>,
    at: Location,
}

impl Sketch {
    fn push(&mut self, cmd: DrawCommand) -> bool {
        if self.keys.insert(ElementKey::of(&cmd)) {
            self.commands.push(cmd);
            true
        } else {
            false
        }
    }

    fn mark(&mut self, content: MarkContent, color: Color, seq: u32) -> bool {
        self.push(DrawCommand::Mark(Mark {
            location: self.at,
            color,
            content,
            anim_seq: seq,
            feedback: Default::default(),
        }))
    }

    fn goto(&mut self, to: Location, label: String, conditional: bool, seq: u32) {
        let dashed = conditional || self.at == Location::Somewhere || to == Location::Somewhere;
        if self.at != to {
            self.push(DrawCommand::Link(Link {
                from: self.at,
                to,
                color: if dashed { Color::Yellow } else { Color::Blue },
                line_type: if dashed { LineType::Dashed } else { LineType::Solid },
                label,
                anim_seq: seq,
                feedback: Default::default(),
            }));
        }
        self.at = to;
        self.mark(MarkContent::StepNumber(seq), Color::Blue, seq);
    }

    fn actions(&mut self, actions: &[Action], seq: u32, condition: Option<&str>) {
        for action in actions {
            match action {
                Action::Wake { .. } => {
                    self.mark(MarkContent::Icon(Icon::Wakeup), Color::Green, seq);
                }
                Action::Goto { location } => {
                    let label = match condition {
                        Some(c) => format!("if {c}"),
                        None => format!("step {seq}"),
                    };
                    self.goto(*location, label, condition.is_some(), seq);
                }
                Action::Say { .. } => {
                    self.mark(MarkContent::Icon(Icon::Speak), Color::Pink, seq);
                }
                Action::Ask { .. } => {
                    self.mark(MarkContent::Icon(Icon::Ask), Color::Pink, seq);
                }
                Action::Detect { .. } => {
                    self.mark(MarkContent::Icon(Icon::HumanDetect), Color::Red, seq);
                }
                Action::Branch {
                    condition: cond,
                    then_steps,
                    else_steps,
                } => {
                    let (yes, no) = match cond {
                        Condition::Contains { var, keyword } => {
                            (format!("{var} contains {keyword}"), format!("{var} lacks {keyword}"))
                        }
                        Condition::IsTrue { var } => (format!("{var} is true"), format!("{var} is false")),
                        Condition::IsFalse { var } => (format!("{var} is false"), format!("{var} is true")),
                    };
                    let start = self.at;
                    self.actions(then_steps, seq, Some(&yes));
                    let after_then = self.at;
                    self.at = start;
                    self.actions(else_steps, seq, Some(&no));
                    if self.at != after_then {
                        self.at = Location::Somewhere;
                    }
                }
            }
        }
    }
}

/// Draws task steps on the map: arrows for movement, icons for speech and
/// sensing, numbered marks at each destination. Every step owns at least
/// one element, with `animSeq` equal to its 1-based position.
pub fn synthesize_drawing(steps: &[String], mode: DrawMode) -> (DrawProgram, DrawConfig) {
    let mut sketch = Sketch {
        commands: Vec::new(),
        keys: HashSet::new(),
        at: Location::StartingPoint,
    };
    let mut sequence = Vec::with_capacity(steps.len());
    for (i, text) in steps.iter().enumerate() {
        let seq = i as u32 + 1;
        let before = sketch.commands.len();
        if let Ok(action) = parse_step(text) {
            sketch.actions(std::slice::from_ref(&action), seq, None);
        }
        if sketch.commands.len() == before && !sketch.mark(MarkContent::StepNumber(seq), Color::Gray, seq) {
            let at = sketch.at;
            sketch.at = Location::StartingPoint;
            sketch.mark(MarkContent::StepNumber(seq), Color::Gray, seq);
            sketch.at = at;
        }
        sequence.push(SequenceItem::new(seq.to_string(), text.clone()));
    }
    (DrawProgram::new(sketch.commands), DrawConfig::new(mode, sequence))
}
