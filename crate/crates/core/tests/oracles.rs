//! Frozen reference values checked against independent quadrature and
//! root-finding oracles.

mod common;

use std::f64::consts::PI;

use cascade_core::boundary::{choose_mus, psi_inverse_closed_form, psi_matrix};
use cascade_core::linalg::{
    ackermann_place, eigenvalues, inverse, is_negative_definite, symmetric_eigen, Matrix,
};
use cascade_core::quadrature::simpson;
use cascade_core::{presets, BcKind, ShapeFn, SpectralBasis};
use common::integrate;

fn nd_pi() -> SpectralBasis {
    SpectralBasis::new(BcKind::ND, PI).unwrap()
}

/// Largest root of det(sI − S) for a 3×3 S, by bisection on the cubic.
fn largest_root_3x3(s: &Matrix) -> f64 {
    let tr = s.trace();
    let minors = s[(0, 0)] * s[(1, 1)] - s[(0, 1)] * s[(1, 0)] + s[(0, 0)] * s[(2, 2)]
        - s[(0, 2)] * s[(2, 0)]
        + s[(1, 1)] * s[(2, 2)]
        - s[(1, 2)] * s[(2, 1)];
    let det = s[(0, 0)] * (s[(1, 1)] * s[(2, 2)] - s[(1, 2)] * s[(2, 1)])
        - s[(0, 1)] * (s[(1, 0)] * s[(2, 2)] - s[(1, 2)] * s[(2, 0)])
        + s[(0, 2)] * (s[(1, 0)] * s[(2, 1)] - s[(1, 1)] * s[(2, 0)]);
    let p = |x: f64| x * x * x - tr * x * x + minors * x - det;
    let bound = 1.0 + s.as_slice().iter().map(|v| v.abs()).sum::<f64>();
    // scan down from the Cauchy bound to bracket the top sign change
    let mut hi = bound;
    let steps = 100_000;
    let h = 2.0 * bound / steps as f64;
    let mut lo = hi - h;
    while p(lo) > 0.0 {
        hi = lo;
        lo -= h;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if p(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn symmetric_part_of_reference_reaction() {
    let s = presets::internal_reference().reaction.sym();
    let oracle = largest_root_3x3(&s);
    let got = symmetric_eigen(&s).unwrap().max();
    assert!((21.0..=22.5).contains(&oracle));
    assert!((got - oracle).abs() < 1e-10);
}

#[test]
fn fourth_mode_dissipative_for_reference() {
    let spec = presets::internal_reference();
    let mut s = spec.reaction.sym();
    for i in 0..3 {
        s[(i, i)] += 9.0 - 12.25 * spec.diffusion[i];
    }
    assert!(largest_root_3x3(&s) < 0.0);
    assert!(is_negative_definite(&s, 0.0).unwrap());
}

#[test]
fn cascade_placement_two_by_two() {
    let q = Matrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 0.0]);
    let b = Matrix::column(&[1.0, 0.0]);
    let k = ackermann_place(&q, &b, &[-1.0, -2.0]).unwrap();
    let cl = &q + &(&b * &k);
    // 2×2 characteristic polynomial s² − tr s + det
    assert!((cl.trace() + 3.0).abs() < 1e-12);
    let det = cl[(0, 0)] * cl[(1, 1)] - cl[(0, 1)] * cl[(1, 0)];
    assert!((det - 2.0).abs() < 1e-12);
}

#[test]
fn reference_poles_placed() {
    let spec = presets::internal_reference();
    let k = ackermann_place(&spec.reaction, &spec.input(), &[-8.5, -9.5, -10.5]).unwrap();
    let mut got: Vec<f64> = eigenvalues(&(&spec.reaction + &(&spec.input() * &k)))
        .unwrap()
        .eigenvalues
        .iter()
        .map(|z| {
            assert!(z.im.abs() < 1e-6);
            z.re
        })
        .collect();
    got.sort_by(f64::total_cmp);
    for (a, b) in got.iter().zip([-10.5, -9.5, -8.5]) {
        assert!((a - b).abs() < 1e-6, "{a} vs {b}");
    }
}

#[test]
fn indicator_projection_matches_quadrature() {
    let basis = nd_pi();
    let shape = ShapeFn::Indicator { a: 0.1, b: 0.2 };
    let oracle = integrate(&|x| basis.phi(1, x).unwrap(), 0.1, 0.2, 1e-14);
    let got = basis.project_shape(&shape, 1).unwrap();
    assert!((got - oracle).abs() < 1e-13);
    // unit-interval amplitude √2 rescaled by 1/√L
    let frozen = 2.0 * 2f64.sqrt() * (0.1f64.sin() - 0.05f64.sin()) / PI.sqrt();
    assert!((got - frozen).abs() < 1e-14);
    assert!((got * PI.sqrt() - 0.14101).abs() < 5e-6);
}

#[test]
fn lifting_projection_matches_quadrature() {
    let basis = nd_pi();
    let psi = basis.psi(121.0).unwrap();
    let oracle = integrate(&|x| psi.eval(x) * basis.phi(1, x).unwrap(), 0.0, PI, 1e-14);
    let got = psi.project(1).unwrap();
    assert!((got - oracle).abs() < 1e-12);
    assert!((got * PI.sqrt() + 2f64.sqrt() * 0.5 / 120.75).abs() < 1e-12);
    for n in 1..=6 {
        let lambda = basis.eigenvalue(n).unwrap();
        let closed =
            (-1f64).powi(n as i32) * 2f64.sqrt() * lambda.sqrt() / (121.0 - lambda) / PI.sqrt();
        assert!((psi.project(n).unwrap() - closed).abs() < 1e-13);
    }
}

#[test]
fn lifting_projections_all_boundary_kinds() {
    for kind in [BcKind::NN, BcKind::ND, BcKind::DN, BcKind::DD] {
        let basis = SpectralBasis::new(kind, 1.3).unwrap();
        let mus = choose_mus(&basis, 10, 1).unwrap();
        for (j, &mu) in mus.iter().enumerate() {
            let psi = basis.psi(mu).unwrap();
            let res = psi.residuals();
            assert!(
                res.ode < 1e-12 && res.left < 1e-12 && res.right < 1e-12,
                "{kind:?} j={j}"
            );
            for n in 1..=10 {
                let oracle =
                    integrate(&|x| psi.eval(x) * basis.phi(n, x).unwrap(), 0.0, 1.3, 1e-13);
                let got = psi.project(n).unwrap();
                assert!(
                    (got - oracle).abs() <= 1e-9,
                    "{kind:?} j={} n={n}: {got} vs {oracle}",
                    j + 1
                );
            }
        }
    }
}

#[test]
fn orthonormal_gram() {
    for kind in [BcKind::NN, BcKind::ND, BcKind::DN, BcKind::DD] {
        let basis = SpectralBasis::new(kind, 2.0).unwrap();
        for n in 1..=20 {
            for k in n..=20 {
                let g = simpson(
                    |x| basis.phi(n, x).unwrap() * basis.phi(k, x).unwrap(),
                    0.0,
                    2.0,
                    4001,
                );
                let e = if n == k { 1.0 } else { 0.0 };
                assert!((g - e).abs() < 1e-8, "{kind:?} ({n},{k}) = {g}");
            }
        }
    }
}

#[test]
fn initial_projection_matches_quadrature() {
    let basis = nd_pi();
    let z0 = presets::reference_initial();
    for n in 1..=10 {
        let got = basis.project_initial(&z0, n).unwrap();
        for i in 0..3 {
            let oracle = integrate(
                &|x| z0.eval(i, x, PI) * basis.phi(n, x).unwrap(),
                0.0,
                PI,
                1e-14,
            );
            assert!((got.values[i] - oracle).abs() < 1e-12, "n={n} i={i}");
        }
    }
}

#[test]
fn parseval_spot_check() {
    let basis = nd_pi();
    let z0 = presets::reference_initial();
    for i in 0..3 {
        let exact = integrate(&|x| z0.eval(i, x, PI).powi(2), 0.0, PI, 1e-13);
        let modal: f64 = (1..=200)
            .map(|n| basis.project_initial(&z0, n).unwrap().values[i].powi(2))
            .sum();
        assert!(
            common::rel_err(modal, exact) < 0.01,
            "component {i}: {modal} vs {exact}"
        );
    }
}

#[test]
fn reference_psi_inverse_against_lu() {
    let basis = nd_pi();
    let mus = choose_mus(&basis, 3, 5).unwrap();
    let psi = psi_matrix(&basis, &mus, 3).unwrap();
    let (closed, _) = psi_inverse_closed_form(&basis, &mus).unwrap();
    let lu = inverse(&psi).unwrap();
    for i in 0..3 {
        for k in 0..3 {
            assert!(common::rel_err(closed[(i, k)], lu[(i, k)]) < 1e-8);
        }
    }
    // alternating sign pattern of the reference configuration
    for n in 0..3 {
        for j in 0..3 {
            assert_eq!(psi[(n, j)] < 0.0, n % 2 == 0);
        }
    }
}

#[test]
fn six_mode_product_identity() {
    let basis = SpectralBasis::new(BcKind::DN, 1.0).unwrap();
    let mus = choose_mus(&basis, 6, 2).unwrap();
    let psi = psi_matrix(&basis, &mus, 6).unwrap();
    let (closed, _) = psi_inverse_closed_form(&basis, &mus).unwrap();
    assert!((&psi * &closed).max_abs_diff(&Matrix::identity(6)) < 1e-7);
}

#[test]
fn lifted_spectrum_is_mu() {
    let basis = nd_pi();
    let mus = choose_mus(&basis, 3, 5).unwrap();
    let psi = psi_matrix(&basis, &mus, 3).unwrap();
    let (inv, _) = psi_inverse_closed_form(&basis, &mus).unwrap();
    let lifted = &(&psi * &Matrix::diag(&mus)) * &inv;
    // columns of Ψ are eigenvectors: backward error of each pair
    for (j, &mu) in mus.iter().enumerate() {
        let v = psi.block(0, j, 3, 1);
        let r = &(&lifted * &v) - &v.scale(mu);
        assert!(r.norm_fro() <= 1e-7 * lifted.norm_fro() * v.norm_fro());
    }
    // a direct eigensolve is limited by the eigenvector conditioning of Ψ
    let mut got: Vec<f64> = eigenvalues(&lifted)
        .unwrap()
        .eigenvalues
        .iter()
        .map(|z| z.re)
        .collect();
    got.sort_by(f64::total_cmp);
    for (a, b) in got.iter().zip(&mus) {
        assert!(common::rel_err(*a, *b) < 1e-6, "{a} vs {b}");
    }
}
