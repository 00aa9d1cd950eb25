//! Static SVG and CSV reports.

use std::fmt::Write as _;

use rearrange_core::Point;

/// What a picture shows: a polyline, optional partition points, optional
/// increment sequences.
#[derive(Clone, Debug, Default)]
pub struct Figure {
    pub curve: Vec<Point<f64>>,
    pub points: Vec<Point<f64>>,
    pub dx: Vec<f64>,
    pub dy: Vec<f64>,
}

const PANEL_GAP: f64 = 0.2;

fn fmt(v: f64) -> String {
    format!("{:.6}", v)
}

fn polyline(out: &mut String, pts: impl IntoIterator<Item = (f64, f64)>, style: &str) {
    let coords: Vec<String> = pts.into_iter().map(|(x, y)| format!("{},{}", fmt(x), fmt(1.0 - y))).collect();
    let _ = writeln!(out, r#"<polyline fill="none" {style} points="{}"/>"#, coords.join(" "));
}

/// Step plot of `v` over `[x0, x0 + 1]` scaled so the largest value reaches 1.
fn staircase(v: &[f64], x0: f64, scale: f64) -> Vec<(f64, f64)> {
    let s = v.len() as f64;
    let mut pts = Vec::with_capacity(2 * v.len());
    for (i, &h) in v.iter().enumerate() {
        let h = if scale > 0.0 { h / scale } else { 0.0 };
        pts.push((x0 + i as f64 / s, h));
        pts.push((x0 + (i + 1) as f64 / s, h));
    }
    pts
}

/// Renders the curve panel in `[0, 1]²` and, when increments are present,
/// a second panel with the `dx` and `dy` staircases overlaid.
pub fn svg(fig: &Figure) -> String {
    let (mut lo, mut hi) = (Point::new(0.0_f64, 0.0), Point::new(1.0_f64, 1.0));
    for p in &fig.curve {
        lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let staircases = !fig.dx.is_empty();
    let right = if staircases { hi.x.max(1.0 + PANEL_GAP + 1.0) } else { hi.x };
    let pad = 0.05;
    let (vx, vy) = (lo.x - pad, 1.0 - hi.y - pad);
    let (vw, vh) = (right - lo.x + 2.0 * pad, hi.y - lo.y + 2.0 * pad);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" width="{}" height="{}">"#,
        fmt(vx),
        fmt(vy),
        fmt(vw),
        fmt(vh),
        (vw * 400.0).round(),
        (vh * 400.0).round()
    );
    let _ = writeln!(out, r##"<rect x="0" y="0" width="1" height="1" fill="none" stroke="#bbb" stroke-width="0.004"/>"##);
    polyline(&mut out, [(0.0, 0.0), (1.0, 1.0)], r##"stroke="#ddd" stroke-width="0.003""##);
    polyline(&mut out, fig.curve.iter().map(|p| (p.x, p.y)), r##"stroke="#1f4e99" stroke-width="0.006""##);
    for (i, p) in fig.points.iter().enumerate() {
        let _ = writeln!(
            out,
            r##"<circle cx="{}" cy="{}" r="0.012" fill="#c0392b"/><text x="{}" y="{}" font-size="0.04">A{i}</text>"##,
            fmt(p.x),
            fmt(1.0 - p.y),
            fmt(p.x + 0.015),
            fmt(1.0 - p.y - 0.015)
        );
    }
    if staircases {
        let x0 = 1.0 + PANEL_GAP;
        let scale = fig.dx.iter().chain(&fig.dy).fold(0.0_f64, |m, v| m.max(*v));
        let _ = writeln!(
            out,
            r##"<rect x="{}" y="0" width="1" height="1" fill="none" stroke="#bbb" stroke-width="0.004"/>"##,
            fmt(x0)
        );
        polyline(&mut out, staircase(&fig.dx, x0, scale), r##"stroke="#1f4e99" stroke-width="0.006""##);
        polyline(
            &mut out,
            staircase(&fig.dy, x0, scale),
            r##"stroke="#c0392b" stroke-width="0.004" stroke-dasharray="0.02 0.01""##,
        );
        let _ = writeln!(out, r##"<text x="{}" y="1.04" font-size="0.04" fill="#1f4e99">dx</text>"##, fmt(x0));
        let _ = writeln!(out, r##"<text x="{}" y="1.04" font-size="0.04" fill="#c0392b">dy</text>"##, fmt(x0 + 0.1));
    }
    out.push_str("</svg>\n");
    out
}

/// `i,dx,dy` rows; values are written as given.
pub fn csv(dx: &[String], dy: &[String]) -> String {
    let mut out = String::from("i,dx,dy\n");
    for (i, (a, b)) in dx.iter().zip(dy).enumerate() {
        let _ = writeln!(out, "{i},{a},{b}");
    }
    out
}
