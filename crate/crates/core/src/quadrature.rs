//! Composite Simpson rules and closed-form trigonometric integrals.

use crate::linalg::Tolerances;

/// Composite Simpson over equally spaced samples. An even sample count
/// closes with a 3/8 panel.
pub fn simpson_samples(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    match n {
        0 | 1 => 0.0,
        2 => 0.5 * h * (values[0] + values[1]),
        3 => h / 3.0 * (values[0] + 4.0 * values[1] + values[2]),
        _ if n % 2 == 1 => {
            let mut s = values[0] + values[n - 1];
            for (i, v) in values.iter().enumerate().take(n - 1).skip(1) {
                s += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
            }
            s * h / 3.0
        }
        _ => {
            let head = simpson_samples(&values[..n - 3], h);
            let t = &values[n - 4..];
            head + 3.0 * h / 8.0 * (t[0] + 3.0 * t[1] + 3.0 * t[2] + t[3])
        }
    }
}

/// Composite Simpson of f on [a, b] with `nodes` points (forced odd).
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, nodes: usize) -> f64 {
    let nodes = if nodes.is_multiple_of(2) {
        nodes + 1
    } else {
        nodes.max(3)
    };
    let h = (b - a) / (nodes - 1) as f64;
    let vals: Vec<f64> = (0..nodes).map(|i| f(a + h * i as f64)).collect();
    simpson_samples(&vals, h)
}

/// Simpson with the crate default node count.
pub fn simpson_default(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    simpson(f, a, b, Tolerances::QUADRATURE_NODES)
}

/// ∫_a^b cos(wx) dx.
pub fn int_cos(w: f64, a: f64, b: f64) -> f64 {
    let half = 0.5 * w * (b - a);
    if half.abs() < 1e-9 {
        return (b - a) * (0.5 * w * (a + b)).cos();
    }
    2.0 * (0.5 * w * (a + b)).cos() * half.sin() / w
}

/// ∫_a^b sin(wx) dx.
pub fn int_sin(w: f64, a: f64, b: f64) -> f64 {
    let half = 0.5 * w * (b - a);
    if half.abs() < 1e-9 {
        return (b - a) * (0.5 * w * (a + b)).sin();
    }
    2.0 * (0.5 * w * (a + b)).sin() * half.sin() / w
}
