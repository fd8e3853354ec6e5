//! Fixed inputs shared by the golden and acceptance suites.

use std::path::PathBuf;

use taskviz_core::domain::{DrawConfig, DrawMode, SequenceItem};
use taskviz_core::draw::{compile_frames, parse_draw_script, FrameTiming, ScriptErrorKind};
use taskviz_core::{Frame, Frames};

pub const BASE: &str = r#"
mark("Starting point", "green", "wakeup", 1)
link("Starting point", "Reception area", "blue", "solid", "go to reception", 2)
mark("Reception area", "blue", "speak", 3)
mark("Reception area", "pink", "ask", 4)
link("Reception area", "Meeting room", "yellow", "dashed", "if visiting \"Meeting room\"", 5)
mark("Meeting room", "blue", 5, 5)
"#;

pub const EDITED: &str = r#"
mark("Starting point", "green", "wakeup", 1)
link("Starting point", "Reception area", "blue", "solid", "go to reception", 2)
mark("Reception area", "blue", "speak", 3)
link("Reception area", "Meeting room", "yellow", "dashed", "if visiting \"Meeting room\"", 5, "del")
mark("Meeting room", "blue", 5, 5, "del")
link("Reception area", "Somewhere", "yellow", "dashed", "guide & wait <here>", 4, "add")
mark("Gym", "red", "humanDetect", 6, "add")
"#;

pub fn frames(src: &str, mode: DrawMode, sequence: Vec<SequenceItem>) -> Frames {
    let program = parse_draw_script(src).expect("fixture scripts parse");
    compile_frames(&program, &DrawConfig::new(mode, sequence), &FrameTiming::default()).expect("fixture frames compile")
}

/// Directory holding the checked-in SVG goldens.
pub fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/goldens")
}

/// The six golden frames, by file stem.
pub fn golden_frames() -> Vec<(&'static str, Frame)> {
    let none = frames(BASE, DrawMode::None, vec![]);
    let feedback = frames(EDITED, DrawMode::Feedback, vec![]);
    let seq = vec![
        SequenceItem::new("1", "start with keyword hello"),
        SequenceItem::new("2", "go to Reception area"),
        SequenceItem::new("5", "if visiting the meeting room, go there"),
    ];
    let confirm = frames(BASE, DrawMode::Confirm, seq);
    vec![
        ("static", none.frames[0].clone()),
        ("feedback-start", feedback.frames[0].clone()),
        ("feedback-mid", feedback.frames[3].clone()),
        ("feedback-end", feedback.frames[6].clone()),
        ("confirm-first", confirm.frames[0].clone()),
        ("confirm-last", confirm.frames[2].clone()),
    ]
}

pub type KindCheck = fn(&ScriptErrorKind) -> bool;

/// Malformed drawing scripts with the line of their first error.
pub const MALFORMED_SCRIPTS: &[(&str, usize, KindCheck)] = &[
    ("circle(\"Gym\", \"red\", 1, 1)", 1, |k| matches!(k, ScriptErrorKind::UnknownFunction(f) if f == "circle")),
    (
        "mark(\"Gym\", \"red\", 1, 1)\nmark(\"Gym\", \"red\", 1)",
        2,
        |k| matches!(k, ScriptErrorKind::Arity { function: "mark", found: 3, .. }),
    ),
    (
        "\n\nlink(\"Gym\", \"Pantry\", \"red\", \"wavy\", \"x\", 1)",
        3,
        |k| matches!(k, ScriptErrorKind::BadEnum { field: "lineType", .. }),
    ),
    ("mark(\"Gym\", \"magenta\", 1, 1)", 1, |k| matches!(k, ScriptErrorKind::BadEnum { field: "color", .. })),
    ("mark(\"Basement\", \"red\", 1, 1)", 1, |k| matches!(k, ScriptErrorKind::UnknownLocation(l) if l == "Basement")),
    ("mark(\"Gym\", \"red\", 1, 0)", 1, |k| matches!(k, ScriptErrorKind::BadNumber { .. })),
    ("mark(\"Gym\", \"red\", 1, -2)", 1, |k| matches!(k, ScriptErrorKind::Syntax(_) | ScriptErrorKind::BadNumber { .. })),
    ("mark(\"Gym\", \"red\", 1, 1, \"maybe\")", 1, |k| matches!(k, ScriptErrorKind::BadEnum { field: "feedbackType", .. })),
    ("mark(\"Gym\", \"red\", \"teapot\", 1)", 1, |k| matches!(k, ScriptErrorKind::BadEnum { .. })),
    ("mark(\"Gym\", \"red\", 1, 1", 1, |k| matches!(k, ScriptErrorKind::Syntax(_))),
    ("mark(\"Gym, \"red\", 1, 1)", 1, |k| matches!(k, ScriptErrorKind::Syntax(_))),
    ("\n\n\n\nlink(\"Gym\" \"Pantry\")", 5, |k| matches!(k, ScriptErrorKind::Syntax(_))),
];
