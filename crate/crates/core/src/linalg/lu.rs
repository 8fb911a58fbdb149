use super::{require_square, LinalgError, Matrix, Tolerances};

/// LU factorization with partial pivoting, PA = LU.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
    parity: f64,
}

impl Lu {
    pub fn factor(a: &Matrix) -> Result<Self, LinalgError> {
        Self::factor_with(a, Tolerances::SINGULAR_PIVOT)
    }

    /// Factorization that reports singularity only below `rel_pivot`·max|a|.
    pub fn factor_with(a: &Matrix, rel_pivot: f64) -> Result<Self, LinalgError> {
        let n = require_square(a)?;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut parity = 1.0;
        let threshold = rel_pivot * a.max_abs();
        for k in 0..n {
            let (p, pivot) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .max_by(|x, y| x.1.total_cmp(&y.1))
                .expect("non-empty column");
            if pivot <= threshold || pivot == 0.0 {
                return Err(LinalgError::Singular { col: k, pivot });
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
                parity = -parity;
            }
            let d = lu[(k, k)];
            for i in (k + 1)..n {
                let f = lu[(i, k)] / d;
                lu[(i, k)] = f;
                if f != 0.0 {
                    for j in (k + 1)..n {
                        lu[(i, j)] -= f * lu[(k, j)];
                    }
                }
            }
        }
        Ok(Self { lu, perm, parity })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    pub fn solve(&self, b: &Matrix) -> Result<Matrix, LinalgError> {
        let n = self.dim();
        if b.rows() != n {
            return Err(LinalgError::DimensionMismatch(format!(
                "right-hand side has {} rows, expected {n}",
                b.rows()
            )));
        }
        let mut x = Matrix::from_fn(n, b.cols(), |i, j| b[(self.perm[i], j)]);
        for c in 0..b.cols() {
            for i in 0..n {
                let mut s = x[(i, c)];
                for k in 0..i {
                    s -= self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, c)];
                for k in (i + 1)..n {
                    s -= self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s / self.lu[(i, i)];
            }
        }
        Ok(x)
    }

    /// Solves Aᵀx = b.
    pub fn solve_transposed(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        // Aᵀ = Uᵀ Lᵀ P, so solve Uᵀ y = b, Lᵀ z = y, x = Pᵀ z.
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for (k, yk) in y.iter().enumerate().take(i) {
                s -= self.lu[(k, i)] * yk;
            }
            y[i] = s / self.lu[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for (k, yk) in y.iter().enumerate().skip(i + 1) {
                s -= self.lu[(k, i)] * yk;
            }
            y[i] = s;
        }
        let mut x = vec![0.0; n];
        for i in 0..n {
            x[self.perm[i]] = y[i];
        }
        x
    }

    pub fn determinant(&self) -> f64 {
        self.lu.diagonal().iter().product::<f64>() * self.parity
    }
}

pub fn solve_linear(a: &Matrix, b: &Matrix) -> Result<Matrix, LinalgError> {
    Lu::factor(a)?.solve(b)
}

pub fn inverse(a: &Matrix) -> Result<Matrix, LinalgError> {
    Lu::factor(a)?.solve(&Matrix::identity(a.rows()))
}

/// Determinant; zero for matrices the pivot test deems singular.
pub fn determinant(a: &Matrix) -> Result<f64, LinalgError> {
    match Lu::factor(a) {
        Ok(lu) => Ok(lu.determinant()),
        Err(LinalgError::Singular { .. }) => Ok(0.0),
        Err(e) => Err(e),
    }
}

/// ‖A‖₁‖A⁻¹‖₁; infinite when singular.
pub fn condition_one(a: &Matrix) -> Result<f64, LinalgError> {
    match inverse(a) {
        Ok(inv) => Ok(a.norm_one() * inv.norm_one()),
        Err(LinalgError::Singular { .. }) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}

/// Minimum-residual solution of an overdetermined system by Householder QR.
/// Fails when A has numerically dependent columns.
pub fn least_squares(a: &Matrix, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
    let (m, n) = a.shape();
    if b.len() != m {
        return Err(LinalgError::DimensionMismatch(format!(
            "right-hand side has {} entries, expected {m}",
            b.len()
        )));
    }
    if n > m {
        return Err(LinalgError::RankDeficient { rank: m, cols: n });
    }
    let mut r = a.clone();
    let mut y = b.to_vec();
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    for k in 0..n {
        let norm = (k..m).map(|i| r[(i, k)] * r[(i, k)]).sum::<f64>().sqrt();
        if norm <= 1e-12 * scale {
            return Err(LinalgError::RankDeficient { rank: k, cols: n });
        }
        let alpha = if r[(k, k)] >= 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..m).map(|i| r[(i, k)]).collect();
        v[0] -= alpha;
        let vv: f64 = v.iter().map(|x| x * x).sum();
        for j in k..n {
            let s = 2.0 * (k..m).map(|i| v[i - k] * r[(i, j)]).sum::<f64>() / vv;
            for i in k..m {
                r[(i, j)] -= s * v[i - k];
            }
        }
        let s = 2.0 * (k..m).map(|i| v[i - k] * y[i]).sum::<f64>() / vv;
        for i in k..m {
            y[i] -= s * v[i - k];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for j in (i + 1)..n {
            s -= r[(i, j)] * x[j];
        }
        x[i] = s / r[(i, i)];
    }
    Ok(x)
}
