//! Proptest strategies for drawings and robot programs.

use std::collections::{BTreeSet, HashSet};

use proptest::prelude::*;
use taskviz_core::domain::{
    Color, DrawCommand, DrawProgram, FeedbackType, Icon, LineType, Link, Location, Mark, MarkContent,
};
use taskviz_core::draw::ElementKey;
use taskviz_core::task::{branch_target, template_vars, Action, Condition, RobotProgram};

pub fn location() -> impl Strategy<Value = Location> {
    prop::sample::select(Location::ALL.to_vec())
}

pub fn place() -> impl Strategy<Value = Location> {
    prop::sample::select(Location::PLACES.to_vec())
}

pub fn color() -> impl Strategy<Value = Color> {
    prop::sample::select(Color::ALL.to_vec())
}

pub fn feedback() -> impl Strategy<Value = FeedbackType> {
    prop::sample::select(FeedbackType::ALL.to_vec())
}

pub fn mark_content() -> impl Strategy<Value = MarkContent> {
    prop_oneof![
        (1u32..40).prop_map(MarkContent::StepNumber),
        prop::sample::select(Icon::ALL.to_vec()).prop_map(MarkContent::Icon),
    ]
}

/// Label text including characters that need escaping.
pub fn label() -> impl Strategy<Value = String> {
    "[a-zA-Z0-9 ,.;()'\"\\\\?é\t-]{0,16}"
}

pub fn draw_command() -> impl Strategy<Value = DrawCommand> {
    prop_oneof![
        (location(), color(), mark_content(), 1u32..12, feedback()).prop_map(|(location, color, content, anim_seq, feedback)| {
            DrawCommand::Mark(Mark {
                location,
                color,
                content,
                anim_seq,
                feedback,
            })
        }),
        (location(), location(), color(), any::<bool>(), label(), 1u32..12, feedback()).prop_map(
            |(from, to, color, dashed, label, anim_seq, feedback)| {
                DrawCommand::Link(Link {
                    from,
                    to,
                    color,
                    line_type: if dashed { LineType::Dashed } else { LineType::Solid },
                    label,
                    anim_seq,
                    feedback,
                })
            }
        ),
    ]
}

fn unique(commands: Vec<DrawCommand>) -> DrawProgram {
    let mut seen = HashSet::new();
    commands.into_iter().filter(|c| seen.insert(ElementKey::of(c))).collect()
}

/// Programs with unique element keys.
pub fn draw_program(max: usize) -> impl Strategy<Value = DrawProgram> {
    prop::collection::vec(draw_command(), 0..=max).prop_map(unique)
}

/// Two programs drawn from a shared pool so that they overlap. Shared
/// elements may be recoloured or renumbered in the second program.
pub fn program_pair() -> impl Strategy<Value = (DrawProgram, DrawProgram)> {
    draw_program(14)
        .prop_flat_map(|pool| {
            let n = pool.len();
            (
                Just(pool),
                prop::collection::vec((any::<bool>(), any::<bool>(), color(), 1u32..12, any::<bool>()), n),
                any::<bool>(),
            )
        })
        .prop_map(|(pool, picks, reverse)| {
            let mut old = Vec::new();
            let mut new = Vec::new();
            for (cmd, (in_old, in_new, recolor, reseq, mutate)) in pool.iter().zip(picks) {
                if in_old {
                    old.push(cmd.clone());
                }
                if in_new {
                    let mut c = cmd.clone();
                    if mutate {
                        match &mut c {
                            DrawCommand::Mark(m) => {
                                m.color = recolor;
                                m.anim_seq = reseq;
                            }
                            DrawCommand::Link(l) => {
                                l.color = recolor;
                                l.anim_seq = reseq;
                            }
                        }
                    }
                    new.push(c);
                }
            }
            if reverse {
                new.reverse();
            }
            (DrawProgram::new(old), DrawProgram::new(new))
        })
}

pub const VARS: [&str; 5] = ["reply", "eta", "seen", "name", "dest"];

pub fn var() -> impl Strategy<Value = String> {
    prop::sample::select(VARS.to_vec()).prop_map(String::from)
}

/// Plain text, optionally with one `{var}` slot.
pub fn template() -> impl Strategy<Value = String> {
    ("[a-zA-Z0-9 ,.!?'\"\\\\\n-]{1,20}", prop::option::of(var())).prop_map(|(text, slot)| match slot {
        Some(v) => format!("{text} {{{v}}}"),
        None => text,
    })
}

pub fn condition() -> impl Strategy<Value = Condition> {
    let keyword = prop_oneof!["[a-z]{1,8}", place().prop_map(|l| l.display_name().to_string())];
    prop_oneof![
        (var(), keyword).prop_map(|(var, keyword)| Condition::Contains { var, keyword }),
        var().prop_map(|var| Condition::IsTrue { var }),
        var().prop_map(|var| Condition::IsFalse { var }),
    ]
}

/// Arbitrary action trees; not necessarily valid.
pub fn action() -> impl Strategy<Value = Action> {
    let leaf = prop_oneof![
        4 => location().prop_map(Action::goto),
        3 => template().prop_map(Action::say),
        2 => (template(), var()).prop_map(|(t, v)| Action::ask(t, v)),
        1 => var().prop_map(Action::detect),
    ];
    leaf.prop_recursive(3, 24, 4, |inner| {
        (
            condition(),
            prop::collection::vec(inner.clone(), 0..4),
            prop::collection::vec(inner, 0..3),
        )
            .prop_map(|(condition, then_steps, else_steps)| Action::Branch {
                condition,
                then_steps,
                else_steps,
            })
    })
}

pub fn wake_keyword() -> impl Strategy<Value = String> {
    "[a-z]{1,10}( [a-z]{1,10})?"
}

/// Arbitrary programs, for format round trips.
pub fn robot_program(max_len: usize) -> impl Strategy<Value = RobotProgram> {
    (wake_keyword(), prop::collection::vec(action(), 0..=max_len)).prop_map(|(w, body)| RobotProgram::new(w, body))
}

fn bind(var: &str, bound: &mut BTreeSet<String>, out: &mut Vec<Action>) {
    if !bound.contains(var) {
        out.push(Action::ask(format!("What is {var}?"), var));
        bound.insert(var.to_string());
    }
}

fn repair(actions: Vec<Action>, bound: &mut BTreeSet<String>, target: Option<Location>) -> Vec<Action> {
    let mut out = Vec::new();
    for action in actions {
        match action {
            Action::Wake { .. } => {}
            Action::Goto {
                location: Location::Somewhere,
            } if target.is_none() => out.push(Action::goto(Location::Pantry)),
            Action::Say { template } => {
                for v in template_vars(&template) {
                    bind(v, bound, &mut out);
                }
                out.push(Action::Say { template });
            }
            Action::Ask { template, store } => {
                for v in template_vars(&template) {
                    bind(v, bound, &mut out);
                }
                bound.insert(store.clone());
                out.push(Action::Ask { template, store });
            }
            Action::Detect { store } => {
                bound.insert(store.clone());
                out.push(Action::Detect { store });
            }
            Action::Branch {
                condition,
                then_steps,
                else_steps,
            } => {
                bind(condition.var(), bound, &mut out);
                let mut then_bound = bound.clone();
                let then_steps = repair(then_steps, &mut then_bound, branch_target(&condition));
                let mut else_bound = bound.clone();
                let else_steps = repair(else_steps, &mut else_bound, None);
                *bound = then_bound.intersection(&else_bound).cloned().collect();
                out.push(Action::Branch {
                    condition,
                    then_steps,
                    else_steps,
                });
            }
            goto @ Action::Goto { .. } => out.push(goto),
        }
    }
    out
}

/// Programs that pass validation: arbitrary trees with missing variable
/// bindings filled in by inserted questions.
pub fn valid_robot_program(max_len: usize) -> impl Strategy<Value = RobotProgram> {
    (wake_keyword(), prop::collection::vec(action(), 1..=max_len)).prop_map(|(w, body)| {
        let mut bound = BTreeSet::new();
        let mut body = repair(body, &mut bound, None);
        if body.is_empty() {
            body.push(Action::goto(Location::Gym));
        }
        RobotProgram::new(w, body)
    })
}
