#![allow(dead_code, clippy::excessive_precision)]

use std::f64::consts::PI;

use cascade_core::linalg::Matrix;
use cascade_core::{Actuation, Gamma, PlantSpec, ShapeFn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const GK_X: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const GK_WK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const GK_WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * GK_WK[7];
    let mut g = fc * GK_WG[3];
    for i in 0..7 {
        let dx = h * GK_X[i];
        let s = f(c - dx) + f(c + dx);
        k += GK_WK[i] * s;
        if i % 2 == 1 {
            g += GK_WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss–Kronrod 7/15 quadrature.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (v, e) = gk15(f, a, b);
        if e <= tol || depth == 0 {
            return v;
        }
        let c = 0.5 * (a + b);
        rec(f, a, c, tol / 2.0, depth - 1) + rec(f, c, b, tol / 2.0, depth - 1)
    }
    rec(f, a, b, tol, 40)
}

/// Lower-Hessenberg cascade with distinct diffusions on [1, 3].
pub fn random_cascade(rng: &mut ChaCha8Rng, m: usize) -> PlantSpec {
    let mut diffusion: Vec<f64> = Vec::with_capacity(m);
    while diffusion.len() < m {
        let d = rng.random_range(1.0..3.0);
        if diffusion.iter().all(|e: &f64| (e - d).abs() > 0.05) {
            diffusion.push(d);
        }
    }
    let reaction = Matrix::from_fn(m, m, |i, j| {
        if i == j + 1 {
            let s = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            s * rng.random_range(0.5..2.0)
        } else if i > j + 1 {
            0.0
        } else {
            rng.random_range(-3.0..3.0)
        }
    });
    PlantSpec {
        length: PI,
        diffusion,
        reaction,
        actuation: Actuation::Internal,
        gamma: Gamma::NEUMANN_DIRICHLET,
        shapes: vec![],
        sigma_tolerance: 0.0,
    }
}

/// Disjoint indicator actuators packed into the left half of [0, L].
pub fn indicator_shapes(length: f64, count: usize) -> Vec<ShapeFn> {
    let w = 0.5 * length / count as f64;
    (0..count)
        .map(|j| ShapeFn::Indicator {
            a: j as f64 * w,
            b: (j as f64 + 1.0) * w,
        })
        .collect()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// One line per criterion, in a grep-friendly shape.
pub fn report(id: u32, passed: bool, detail: &str) {
    println!(
        "criterion {id}: {} {detail}",
        if passed { "PASS" } else { "FAIL" }
    );
}
