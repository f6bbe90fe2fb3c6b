//! Static SVG rendering of a record, optionally with an augmented overlay.

use std::fmt::Write;

use crate::signal::Signal;

const WIDTH: f64 = 1200.0;
const HEIGHT: f64 = 320.0;
const MARGIN_LEFT: f64 = 60.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 45.0;

struct Frame {
    duration_s: f64,
    y_max: f64,
}

impl Frame {
    fn x(&self, t_s: f64) -> f64 {
        MARGIN_LEFT + t_s / self.duration_s * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn y(&self, v: f64) -> f64 {
        let mid = MARGIN_TOP + (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM) / 2.0;
        mid - v / self.y_max * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM) / 2.0
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn polyline(out: &mut String, frame: &Frame, signal: &Signal, class: &str, color: &str) {
    let rate = signal.sample_rate_hz();
    let lead = signal.lead(0).expect("signals have at least one lead");
    let _ = write!(
        out,
        r#"<polyline class="{class}" fill="none" stroke="{color}" stroke-width="1" points=""#
    );
    for (i, &v) in lead.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(
            out,
            "{:.2},{:.2}",
            frame.x(i as f64 / rate),
            frame.y(f64::from(v))
        );
    }
    out.push_str("\"/>\n");
}

/// Renders lead 0 of `base` (and of `overlay`, when given) with time in
/// seconds on the x axis and normalized amplitude on the y axis.
pub fn render_svg(title: &str, base: &Signal, overlay: Option<&Signal>) -> String {
    let peak = std::iter::once(base)
        .chain(overlay)
        .flat_map(|s| s.lead(0).unwrap_or(&[]).iter())
        .fold(0.0f64, |m, &v| m.max(f64::from(v).abs()));
    let frame = Frame {
        duration_s: base.duration_s(),
        y_max: if peak > 0.0 { peak * 1.05 } else { 1.0 },
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{MARGIN_LEFT}" y="18" font-family="sans-serif" font-size="13">{}</text>"#,
        escape(title)
    );
    let (left, right) = (frame.x(0.0), frame.x(frame.duration_s));
    let (top, bottom) = (frame.y(frame.y_max), frame.y(-frame.y_max));
    let _ = writeln!(
        out,
        r##"<rect x="{left:.2}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#999"/>"##,
        right - left,
        bottom - top
    );
    let zero = frame.y(0.0);
    let _ = writeln!(
        out,
        r##"<line class="zero-line" x1="{left:.2}" y1="{zero:.2}" x2="{right:.2}" y2="{zero:.2}" stroke="#ccc"/>"##
    );
    let ticks = 10;
    for k in 0..=ticks {
        let t = frame.duration_s * k as f64 / ticks as f64;
        let _ = writeln!(
            out,
            r#"<text class="x-tick" x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="10" text-anchor="middle">{t:.1}</text>"#,
            frame.x(t),
            bottom + 14.0
        );
    }
    for v in [-frame.y_max, 0.0, frame.y_max] {
        let _ = writeln!(
            out,
            r#"<text class="y-tick" x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="10" text-anchor="end">{v:.2}</text>"#,
            left - 6.0,
            frame.y(v) + 3.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">time (s)</text>"#,
        (left + right) / 2.0,
        HEIGHT - 8.0
    );
    let _ = writeln!(
        out,
        r#"<text x="14" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle" transform="rotate(-90 14 {:.2})">amplitude (normalized)</text>"#,
        zero, zero
    );
    polyline(&mut out, &frame, base, "base", "#1f5fa8");
    if let Some(aug) = overlay {
        polyline(&mut out, &frame, aug, "augmented", "#d0452f");
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn points(doc: &roxmltree::Document, class: &str) -> Vec<(f64, f64)> {
        let node = doc
            .descendants()
            .find(|n| n.attribute("class") == Some(class))
            .unwrap();
        node.attribute("points")
            .unwrap()
            .split(' ')
            .map(|p| {
                let (x, y) = p.split_once(',').unwrap();
                (x.parse().unwrap(), y.parse().unwrap())
            })
            .collect()
    }

    #[test]
    fn zero_signal_is_flat_on_axis() {
        let s = Signal::zeros(50.0, 1, 100).unwrap();
        let svg = render_svg("A00001 <zero>", &s, None);
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let zero: f64 = doc
            .descendants()
            .find(|n| n.attribute("class") == Some("zero-line"))
            .unwrap()
            .attribute("y1")
            .unwrap()
            .parse()
            .unwrap();
        let pts = points(&doc, "base");
        assert_eq!(pts.len(), 100);
        assert!(pts.iter().all(|&(_, y)| y == zero));
        assert!(doc
            .descendants()
            .all(|n| n.attribute("class") != Some("augmented")));
    }

    #[test]
    fn overlay_adds_second_polyline() {
        let base =
            Signal::single_lead(50.0, (0..50).map(|i| (i as f32 * 0.3).sin()).collect()).unwrap();
        let aug = crate::ops::flip(&base);
        let svg = render_svg("x", &base, Some(&aug));
        let doc = roxmltree::Document::parse(&svg).unwrap();
        assert_ne!(points(&doc, "base"), points(&doc, "augmented"));
    }
}
