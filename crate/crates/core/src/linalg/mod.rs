//! Dense real linear algebra.

mod eigen;
mod expm;
mod lu;
mod lyapunov;
mod matrix;
mod place;
mod tolerances;

pub use eigen::{
    eigenvalues, is_negative_definite, spectral_abscissa, symmetric_eigen, Complex, Spectrum,
    SymmetricEigen,
};
pub use expm::matrix_exponential;
pub use lu::{condition_one, determinant, inverse, least_squares, solve_linear, Lu};
pub use lyapunov::{lyapunov_solve, lyapunov_solve_with};
pub use matrix::Matrix;
pub use place::{ackermann_place, poly_from_roots};
pub use tolerances::Tolerances;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("eigenvalue iteration did not converge within {0} iterations")]
    NoConvergence(usize),
    #[error("matrix is singular (pivot {pivot:e} at column {col})")]
    Singular { col: usize, pivot: f64 },
    #[error("matrix is rank deficient (rank {rank} of {cols})")]
    RankDeficient { rank: usize, cols: usize },
    #[error("matrix is not symmetric (asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("matrix is not Hurwitz: eigenvalue {re} + {im}i")]
    NotHurwitz { re: f64, im: f64 },
    #[error("controllability matrix is singular")]
    Uncontrollable,
    #[error("expected {expected} poles, got {got}")]
    PoleCount { expected: usize, got: usize },
    #[error("matrix exponential overflowed (norm {0:e})")]
    Overflow(f64),
}

pub(crate) fn require_square(a: &Matrix) -> Result<usize, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if !a.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    Ok(a.rows())
}
