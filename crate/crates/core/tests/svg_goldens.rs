//! Rendered frames compared byte-for-byte with checked-in SVG files.
//! Run with `UPDATE_GOLDENS=1` to rewrite them.

use taskviz_core::domain::DrawMode;
use taskviz_core::draw::render_svg;
use taskviz_core::sim::default_map;
use taskviz_core::Map;
use taskviz_testkit::fixtures::{frames, golden_dir, golden_frames, EDITED};

fn check(name: &str, svg: &str) {
    let path = golden_dir().join(format!("{name}.svg"));
    if std::env::var_os("UPDATE_GOLDENS").is_some() {
        std::fs::write(&path, svg).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden {}", path.display()));
    assert_eq!(svg, expected, "{name} differs from its golden");
}

#[test]
fn goldens() {
    let m = default_map();
    for (name, frame) in golden_frames() {
        check(name, &render_svg(&frame, &m).unwrap());
    }
}

#[test]
fn rendering_is_deterministic_and_escaped() {
    let m: Map = default_map();
    let f = frames(EDITED, DrawMode::Feedback, vec![]);
    let a = render_svg(&f.frames[6], &m).unwrap();
    assert_eq!(a, render_svg(&f.frames[6], &m).unwrap());
    assert!(a.contains("guide &amp; wait &lt;here&gt;"));
    assert!(!a.contains("<here>"));
}
