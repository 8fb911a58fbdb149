//! Minimal SVG line charts and grayscale heatmaps.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#000000", "#9467bd", "#8c564b",
];

pub struct Series<'a> {
    pub label: String,
    pub y: &'a [f64],
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(v), b.max(v))
        });
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
        return (lo - 0.5, hi + 0.5);
    }
    (lo, hi)
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="18" text-anchor="middle">{}</text>"#,
        W / 2.0,
        escape(title)
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn axes(out: &mut String, x: (f64, f64), y: (f64, f64), xlabel: &str, ylabel: &str) {
    let (x0, x1, y0, y1) = (LEFT, W - RIGHT, H - BOTTOM, TOP);
    let _ = writeln!(
        out,
        r#"<path d="M{x0} {y1} L{x0} {y0} L{x1} {y0}" fill="none" stroke="black"/>"#
    );
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let px = x0 + f * (x1 - x0);
        let py = y0 + f * (y1 - y0);
        let _ = writeln!(
            out,
            r#"<line x1="{px:.2}" y1="{y0}" x2="{px:.2}" y2="{}" stroke="black"/>"#,
            y0 + 5.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{px:.2}" y="{}" text-anchor="middle">{}</text>"#,
            y0 + 18.0,
            tick(x.0 + f * (x.1 - x.0))
        );
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{py:.2}" x2="{x0}" y2="{py:.2}" stroke="black"/>"#,
            x0 - 5.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
            x0 - 8.0,
            py + 4.0,
            tick(y.0 + f * (y.1 - y.0))
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        H - 10.0,
        escape(xlabel)
    );
    let _ = writeln!(
        out,
        r#"<text x="15" y="{}" text-anchor="middle" transform="rotate(-90 15 {})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(ylabel)
    );
}

fn tick(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-2..1e4).contains(&a) {
        format!("{v:.1e}")
    } else {
        format!("{v:.3}")
    }
}

pub fn line_chart(
    title: &str,
    xlabel: &str,
    ylabel: &str,
    x: &[f64],
    series: &[Series<'_>],
) -> String {
    let xb = bounds(x.iter().copied());
    let yb = bounds(series.iter().flat_map(|s| s.y.iter().copied()));
    let mut out = String::new();
    header(&mut out, title);
    axes(&mut out, xb, yb, xlabel, ylabel);
    let sx = |v: f64| LEFT + (v - xb.0) / (xb.1 - xb.0) * (W - LEFT - RIGHT);
    let sy = |v: f64| (H - BOTTOM) - (v - yb.0) / (yb.1 - yb.0) * (H - BOTTOM - TOP);
    // thin long series so files stay small
    let stride = (x.len() / 1000).max(1);
    for (k, s) in series.iter().enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        let mut d = String::new();
        let mut pen = 'M';
        for (i, (&t, &v)) in x.iter().zip(s.y).enumerate() {
            if i % stride != 0 && i + 1 != x.len() {
                continue;
            }
            if !v.is_finite() {
                pen = 'M';
                continue;
            }
            let _ = write!(d, "{pen}{:.2} {:.2} ", sx(t), sy(v));
            pen = 'L';
        }
        let _ = writeln!(
            out,
            r#"<path d="{}" fill="none" stroke="{colour}" stroke-width="1.5"/>"#,
            d.trim_end()
        );
        let ly = TOP + 15.0 + 16.0 * k as f64;
        let lx = W - RIGHT - 110.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{colour}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}">{}</text>"#,
            lx + 25.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Rows are time samples, columns spatial nodes; dark is low, light is high.
pub fn heatmap(title: &str, t: &[f64], x: &[f64], values: &[Vec<f64>]) -> String {
    let tb = bounds(t.iter().copied());
    let xb = bounds(x.iter().copied());
    let vb = bounds(values.iter().flat_map(|r| r.iter().copied()));
    let mut out = String::new();
    header(&mut out, title);
    let rows = t.len().min(120);
    let cols = x.len().min(120);
    let (pw, ph) = (W - LEFT - RIGHT, H - TOP - BOTTOM);
    let (cw, ch) = (pw / cols as f64, ph / rows as f64);
    for r in 0..rows {
        let ti = r * t.len() / rows;
        for c in 0..cols {
            let xi = c * x.len() / cols;
            let v = values[ti][xi];
            let g = if v.is_finite() {
                (255.0 * (v - vb.0) / (vb.1 - vb.0))
                    .round()
                    .clamp(0.0, 255.0) as u8
            } else {
                0
            };
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="rgb({g},{g},{g})"/>"#,
                LEFT + c as f64 * cw,
                TOP + r as f64 * ch,
                cw + 0.05,
                ch + 0.05
            );
        }
    }
    // time runs downwards, so label the vertical axis with reversed ticks
    axes(&mut out, xb, (tb.1, tb.0), "x", "t");
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="end">range [{}, {}]</text>"#,
        W - RIGHT,
        H - 10.0,
        tick(vb.0),
        tick(vb.1)
    );
    out.push_str("</svg>\n");
    out
}
