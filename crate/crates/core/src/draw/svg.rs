//! Headless SVG rendering of a single frame on the floor plan.
//!
//! Output is a pure function of its inputs, so it can be compared
//! byte-for-byte against checked-in files.

use std::fmt::Write as _;

use thiserror::Error;

use crate::domain::{Color, DrawCommand, Icon, LineType, Location, MarkContent};
use crate::scalar::Scalar;
use crate::sim::{MapGeometry, Point};

use super::frames::{Frame, FrameElement};

const PX_PER_METER: f64 = 40.0;
const PAD_METERS: f64 = 2.0;
const MARK_RADIUS: f64 = 14.0;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SvgError {
    #[error("location {0} is not on the map")]
    UnknownLocation(Location),
}

pub fn color_hex(color: Color) -> &'static str {
    match color {
        Color::White => "#ffffff",
        Color::Green => "#2e9e44",
        Color::Yellow => "#e8b400",
        Color::Blue => "#2f6fd6",
        Color::Red => "#d63a2f",
        Color::Pink => "#e36fb0",
        Color::Gray => "#8a8a8a",
    }
}

fn icon_glyph(icon: Icon) -> &'static str {
    match icon {
        Icon::Speak => "S",
        Icon::Ask => "?",
        Icon::Wakeup => "W",
        Icon::HumanDetect => "H",
    }
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            '\n' => out.push(' '),
            c => out.push(c),
        }
    }
    out
}

struct Canvas {
    origin_x: f64,
    origin_y: f64,
    width: f64,
    height: f64,
    somewhere: (f64, f64),
}

impl Canvas {
    fn new<S: Scalar>(map: &MapGeometry<S>) -> Self {
        let (lo, hi) = map.bounds();
        let (lo_x, lo_y) = (lo.x.to_f64_lossy(), lo.y.to_f64_lossy());
        let (hi_x, hi_y) = (hi.x.to_f64_lossy(), hi.y.to_f64_lossy());
        let origin_x = lo_x - PAD_METERS;
        let origin_y = lo_y - PAD_METERS;
        Canvas {
            origin_x,
            origin_y,
            width: (hi_x - lo_x + 2.0 * PAD_METERS) * PX_PER_METER,
            height: (hi_y - lo_y + 2.0 * PAD_METERS) * PX_PER_METER,
            // Unbound places are drawn at a fixed point above the plan.
            somewhere: ((lo_x + hi_x) / 2.0, lo_y - PAD_METERS / 2.0),
        }
    }

    fn px(&self, p: (f64, f64)) -> (f64, f64) {
        ((p.0 - self.origin_x) * PX_PER_METER, (p.1 - self.origin_y) * PX_PER_METER)
    }

    fn place<S: Scalar>(&self, map: &MapGeometry<S>, loc: Location) -> Result<(f64, f64), SvgError> {
        if loc == Location::Somewhere {
            return Ok(self.px(self.somewhere));
        }
        let p: Point<S> = map.position(loc).ok_or(SvgError::UnknownLocation(loc))?;
        Ok(self.px((p.x.to_f64_lossy(), p.y.to_f64_lossy())))
    }
}

fn group_attrs<S: Scalar>(out: &mut String, class: &str, el: &FrameElement<S>) {
    let _ = write!(
        out,
        "<g class=\"{class}{}\" data-key=\"{}\" opacity=\"{:.3}\"",
        if el.highlight { " highlight" } else { "" },
        escape(&el.key.to_string()),
        el.opacity.to_f64_lossy().clamp(0.0, 1.0),
    );
    if el.highlight {
        out.push_str(" data-highlight=\"true\"");
    }
    out.push_str(">\n");
}

/// Renders one frame over the map as an SVG 1.1 document.
///
/// Marks are circles with a step number or icon glyph, links are arrow paths
/// (dashed stroke for dashed lines) labelled at their midpoint. Links are
/// drawn below marks; within each layer frame order is kept.
pub fn render_svg<S: Scalar>(frame: &Frame<S>, map: &MapGeometry<S>) -> Result<String, SvgError> {
    let canvas = Canvas::new(map);
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.0} {h:.0}\">",
        w = canvas.width,
        h = canvas.height,
    );
    out.push_str("<defs>\n");
    for color in Color::ALL {
        let _ = writeln!(
            out,
            "<marker id=\"arrow-{name}\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"6\" markerHeight=\"6\" orient=\"auto\"><polygon points=\"0,0 10,5 0,10\" fill=\"{hex}\"/></marker>",
            name = color.as_str(),
            hex = color_hex(*color),
        );
    }
    out.push_str("</defs>\n");

    out.push_str("<g id=\"map\">\n");
    let _ = writeln!(
        out,
        "<rect x=\"0\" y=\"0\" width=\"{:.0}\" height=\"{:.0}\" fill=\"#f7f7f2\"/>",
        canvas.width, canvas.height
    );
    for (loc, _) in map.locations() {
        let (x, y) = canvas.place(map, loc)?;
        let _ = writeln!(
            out,
            "<rect class=\"place\" x=\"{:.1}\" y=\"{:.1}\" width=\"80\" height=\"40\" rx=\"6\" fill=\"#e4e4dc\" stroke=\"#b8b8ae\"/>",
            x - 40.0,
            y - 20.0
        );
        let _ = writeln!(
            out,
            "<text class=\"place-name\" x=\"{x:.1}\" y=\"{:.1}\" font-size=\"10\" text-anchor=\"middle\" fill=\"#55554f\">{}</text>",
            y + 32.0,
            escape(loc.display_name())
        );
    }
    out.push_str("</g>\n");

    out.push_str("<g id=\"aids\">\n");
    for el in &frame.elements {
        if let DrawCommand::Link(link) = &el.element {
            let (x1, y1) = canvas.place(map, link.from)?;
            let (x2, y2) = canvas.place(map, link.to)?;
            let (dx, dy) = (x2 - x1, y2 - y1);
            let len = dx.hypot(dy);
            let (sx, sy, ex, ey) = if len > 2.0 * MARK_RADIUS {
                let (ux, uy) = (dx / len, dy / len);
                (
                    x1 + ux * MARK_RADIUS,
                    y1 + uy * MARK_RADIUS,
                    x2 - ux * MARK_RADIUS,
                    y2 - uy * MARK_RADIUS,
                )
            } else {
                (x1, y1, x2, y2)
            };
            group_attrs(&mut out, "link", el);
            let _ = write!(
                out,
                "<path d=\"M {sx:.1} {sy:.1} L {ex:.1} {ey:.1}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{}\" marker-end=\"url(#arrow-{})\"",
                color_hex(link.color),
                if el.highlight { 5 } else { 3 },
                link.color.as_str(),
            );
            if link.line_type == LineType::Dashed {
                out.push_str(" stroke-dasharray=\"8 6\"");
            }
            out.push_str("/>\n");
            if !link.label.is_empty() {
                let _ = writeln!(
                    out,
                    "<text class=\"label\" x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"middle\" fill=\"#222222\">{}</text>",
                    (x1 + x2) / 2.0,
                    (y1 + y2) / 2.0 - 6.0,
                    escape(&link.label)
                );
            }
            out.push_str("</g>\n");
        }
    }
    for el in &frame.elements {
        if let DrawCommand::Mark(mark) = &el.element {
            let (x, y) = canvas.place(map, mark.location)?;
            group_attrs(&mut out, "mark", el);
            if el.highlight {
                let _ = writeln!(
                    out,
                    "<circle class=\"halo\" cx=\"{x:.1}\" cy=\"{y:.1}\" r=\"{:.1}\" fill=\"none\" stroke=\"#ffd400\" stroke-width=\"4\"/>",
                    MARK_RADIUS + 5.0
                );
            }
            let _ = writeln!(
                out,
                "<circle cx=\"{x:.1}\" cy=\"{y:.1}\" r=\"{MARK_RADIUS:.1}\" fill=\"{}\" stroke=\"#333333\" stroke-width=\"1.5\"/>",
                color_hex(mark.color)
            );
            let (class, glyph) = match mark.content {
                MarkContent::StepNumber(n) => ("number".to_string(), n.to_string()),
                MarkContent::Icon(icon) => (format!("icon icon-{}", icon.as_str()), icon_glyph(icon).to_string()),
            };
            let _ = writeln!(
                out,
                "<text class=\"{class}\" x=\"{x:.1}\" y=\"{:.1}\" font-size=\"13\" font-weight=\"bold\" text-anchor=\"middle\" fill=\"#111111\">{}</text>",
                y + 4.5,
                escape(&glyph)
            );
            out.push_str("</g>\n");
        }
    }
    out.push_str("</g>\n");

    if let Some(caption) = &frame.caption {
        let _ = writeln!(
            out,
            "<text class=\"caption\" x=\"{:.1}\" y=\"{:.1}\" font-size=\"14\" text-anchor=\"middle\" fill=\"#111111\">{}</text>",
            canvas.width / 2.0,
            canvas.height - 10.0,
            escape(caption)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{DrawConfig, DrawMode, DrawProgram};
    use crate::draw::{compile_frames, parse_draw_script, FrameList, FrameTiming};
    use crate::sim::default_map;

    fn static_frame(src: &str) -> Frame<f64> {
        let p = parse_draw_script(src).unwrap();
        let list: FrameList<f64> =
            compile_frames(&p, &DrawConfig::new(DrawMode::None, vec![]), &FrameTiming::default()).unwrap();
        list.frames.into_iter().next().unwrap()
    }

    #[test]
    fn one_solid_link_is_one_arrow_path() {
        let frame = static_frame(r#"link("Reception area", "Meeting room", "green", "solid", "guide", 1)"#);
        let svg = render_svg(&frame, &default_map()).unwrap();
        assert_eq!(svg.matches("<path").count(), 1);
        assert!(svg.contains("marker-end=\"url(#arrow-green)\""));
        assert!(!svg.contains("stroke-dasharray"));
        assert!(svg.contains(">guide</text>"));
    }

    #[test]
    fn dashed_link_has_dash_pattern() {
        let frame = static_frame(r#"link("somewhere", "Pantry", "blue", "dashed", "fetch", 1)"#);
        let svg = render_svg(&frame, &default_map()).unwrap();
        assert_eq!(svg.matches("stroke-dasharray=\"8 6\"").count(), 1);
    }

    #[test]
    fn empty_frame_is_background_only() {
        let list: FrameList<f64> = compile_frames(
            &DrawProgram::default(),
            &DrawConfig::new(DrawMode::None, vec![]),
            &FrameTiming::default(),
        )
        .unwrap();
        let svg = render_svg(&list.frames[0], &default_map()).unwrap();
        assert!(svg.contains("<g id=\"aids\">\n</g>"));
        assert_eq!(svg.matches("class=\"place\"").count(), 10);
        assert!(!svg.contains("<circle"));
    }

    #[test]
    fn deterministic_and_escaped() {
        let frame = static_frame(r#"link("Gym", "Pantry", "red", "solid", "<tea & cake>", 1)"#);
        let a = render_svg(&frame, &default_map()).unwrap();
        let b = render_svg(&frame, &default_map()).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("&lt;tea &amp; cake&gt;"));
    }

    #[test]
    fn single_precision_map_renders() {
        let p = parse_draw_script(r#"mark("Gym", "pink", "ask", 1)"#).unwrap();
        let list: FrameList<f32> =
            compile_frames(&p, &DrawConfig::new(DrawMode::None, vec![]), &FrameTiming::default()).unwrap();
        let svg = render_svg(&list.frames[0], &default_map::<f32>()).unwrap();
        assert!(svg.contains("icon-ask"));
    }
}
