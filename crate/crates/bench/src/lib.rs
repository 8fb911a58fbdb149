//! Shared fixtures for the benches.

use cascade_core::linalg::Matrix;
use cascade_core::{presets, SpectralBasis};

/// Internal reference plant with its spectral basis and λ₁.
pub fn internal_fixture() -> (cascade_core::PlantSpec, SpectralBasis, f64) {
    let spec = presets::internal_reference();
    let basis = SpectralBasis::from_plant(&spec).expect("reference plant has a basis");
    let lambda1 = basis.eigenvalue(1).expect("first eigenvalue");
    (spec, basis, lambda1)
}

/// Deterministic Hurwitz test matrix: diagonal −1..−n plus a small coupling.
pub fn hurwitz(n: usize) -> Matrix {
    Matrix::from_fn(n, n, |i, j| {
        if i == j {
            -(1.0 + i as f64)
        } else {
            0.3 * (((i * 7 + j * 13) % 11) as f64 / 11.0 - 0.5)
        }
    })
}
