//! Hand-written SVG for eigenfunction plots.

use std::fmt::Write;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;

/// Polyline of `values` over evenly spaced positions in `[0, 1]`.
pub fn polyline(values: &[f64], title: &str) -> String {
    let n = values.len();
    let lo = values.iter().copied().fold(0.0f64, f64::min);
    let hi = values.iter().copied().fold(0.0f64, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let x = |i: usize| MARGIN + (WIDTH - 2.0 * MARGIN) * i as f64 / (n.max(2) - 1) as f64;
    let y = |v: f64| HEIGHT - MARGIN - (HEIGHT - 2.0 * MARGIN) * (v - lo) / span;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{MARGIN}" y="30" font-family="sans-serif" font-size="14">{}</text>"#, escape(title));
    // Axes: zero line and the left edge.
    let zero = y(0.0);
    let _ = writeln!(
        s,
        r#"<line x1="{MARGIN}" y1="{zero:.2}" x2="{:.2}" y2="{zero:.2}" stroke="gray" stroke-width="1"/>"#,
        WIDTH - MARGIN
    );
    let _ = writeln!(
        s,
        r#"<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{:.2}" stroke="gray" stroke-width="1"/>"#,
        HEIGHT - MARGIN
    );
    for v in [lo, hi] {
        let ty = y(v);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{ty:.2}" x2="{MARGIN}" y2="{ty:.2}" stroke="gray" stroke-width="1"/>"#,
            MARGIN - 6.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">{v:.3}</text>"#,
            MARGIN - 8.0,
            ty + 4.0
        );
    }
    let mut points = String::new();
    for (i, &v) in values.iter().enumerate() {
        if i > 0 {
            points.push(' ');
        }
        let _ = write!(points, "{:.2},{:.2}", x(i), y(v));
    }
    let _ = writeln!(s, r#"<polyline points="{points}" fill="none" stroke="steelblue" stroke-width="1.5"/>"#);
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
