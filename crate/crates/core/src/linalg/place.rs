use super::{require_square, LinalgError, Lu, Matrix};

/// Monic polynomial coefficients of ∏(s − r_i), highest degree first.
pub fn poly_from_roots(roots: &[f64]) -> Vec<f64> {
    let mut c = vec![1.0];
    for r in roots {
        let mut next = vec![0.0; c.len() + 1];
        for (k, a) in c.iter().enumerate() {
            next[k] += a;
            next[k + 1] -= r * a;
        }
        c = next;
    }
    c
}

/// Ackermann's formula: K = −e_mᵀ C⁻¹ p(Q) with C = [B, QB, …, Q^{m−1}B],
/// so that Q + BK has the requested poles.
pub fn ackermann_place(q: &Matrix, b: &Matrix, poles: &[f64]) -> Result<Matrix, LinalgError> {
    let m = require_square(q)?;
    if b.shape() != (m, 1) {
        return Err(LinalgError::DimensionMismatch(format!(
            "input column is {}x{}, expected {m}x1",
            b.rows(),
            b.cols()
        )));
    }
    if poles.len() != m {
        return Err(LinalgError::PoleCount {
            expected: m,
            got: poles.len(),
        });
    }
    let mut cols = Vec::with_capacity(m);
    let mut v = b.clone();
    for _ in 0..m {
        cols.push(v.clone());
        v = q * &v;
    }
    let ctrb = Matrix::hstack(&cols);
    let lu = Lu::factor(&ctrb).map_err(|e| match e {
        LinalgError::Singular { .. } => LinalgError::Uncontrollable,
        other => other,
    })?;
    let mut e_last = vec![0.0; m];
    e_last[m - 1] = 1.0;
    // last row of C⁻¹
    let y = lu.solve_transposed(&e_last);

    let coeffs = poly_from_roots(poles);
    let mut pq = Matrix::zeros(m, m);
    for c in &coeffs {
        pq = &(q * &pq) + &Matrix::identity(m).scale(*c);
    }
    let k = Matrix::from_fn(1, m, |_, j| -(0..m).map(|i| y[i] * pq[(i, j)]).sum::<f64>());
    Ok(k)
}
