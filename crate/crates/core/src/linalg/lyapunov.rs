use super::{eigenvalues, require_square, LinalgError, Lu, Matrix};

/// Solves AᵀP + PA = −I.
pub fn lyapunov_solve(a: &Matrix) -> Result<Matrix, LinalgError> {
    lyapunov_solve_with(a, &Matrix::identity(a.rows()))
}

/// Solves AᵀP + PA = −W through (I⊗Aᵀ + Aᵀ⊗I) vec(P) = −vec(W).
pub fn lyapunov_solve_with(a: &Matrix, w: &Matrix) -> Result<Matrix, LinalgError> {
    let n = require_square(a)?;
    if w.shape() != (n, n) {
        return Err(LinalgError::DimensionMismatch(format!(
            "right-hand side is {}x{}, expected {n}x{n}",
            w.rows(),
            w.cols()
        )));
    }
    let spec = eigenvalues(a)?;
    if let Some(z) = spec.eigenvalues.iter().find(|z| z.re >= 0.0) {
        return Err(LinalgError::NotHurwitz { re: z.re, im: z.im });
    }
    let at = a.transpose();
    let eye = Matrix::identity(n);
    let op = &eye.kron(&at) + &at.kron(&eye);
    // column-stacked vec
    let rhs = Matrix::from_fn(n * n, 1, |k, _| -w[(k % n, k / n)]);
    // a Hurwitz A makes the operator nonsingular, so only exact zero pivots are rejected
    let v = Lu::factor_with(&op, 0.0)?.solve(&rhs)?;
    let p = Matrix::from_fn(n, n, |i, j| v[(j * n + i, 0)]);
    Ok(p.sym())
}
