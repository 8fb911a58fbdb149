//! Polynomial modal transformation T_n = I + Σ λ_nⁱ T̄_i.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{least_squares, Matrix};
use crate::model::PlantSpec;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransformFamily {
    pub m: usize,
    pub sigma: usize,
    pub sigma_bar: usize,
    /// T̄_1..T̄_σ̄.
    pub tbars: Vec<Matrix>,
}

/// Whether (j, k), 1-based, may be nonzero in T̄_i.
pub fn in_pattern(m: usize, i: usize, j: usize, k: usize) -> bool {
    let c = i.div_ceil(2);
    j >= 1 && j + 1 + c <= m && k >= j + c && k <= m
}

/// Pattern entries of T̄_i in the order Algorithm 1 visits them.
pub fn pattern(m: usize, i: usize) -> Vec<(usize, usize)> {
    let c = i.div_ceil(2);
    let mut out = Vec::new();
    if m < 1 + c + 1 {
        return out;
    }
    for j in (1..=m - 1 - c).rev() {
        for k in (j + c..=m).rev() {
            out.push((j, k));
        }
    }
    out
}

/// (I − BBᵀ)·X: zero the first row.
fn project_out_input(mut x: Matrix) -> Matrix {
    for k in 0..x.cols() {
        x[(0, k)] = 0.0;
    }
    x
}

/// Algorithm 1: every κ of T̄_i follows from rows below it and from T̄_{i−1}.
pub fn build_transform(spec: &PlantSpec) -> Result<TransformFamily> {
    spec.ensure_valid()?;
    let m = spec.m();
    let sig = spec.sigma_index();
    let q = |r: usize, c: usize| spec.reaction[(r - 1, c - 1)];
    let d = |k: usize| spec.diffusion[k - 1];
    let dm = spec.d_last();
    let mut tbars: Vec<Matrix> = Vec::with_capacity(sig.sigma_bar);
    for i in 1..=sig.sigma_bar {
        let prev = if i == 1 {
            Matrix::identity(m)
        } else {
            tbars[i - 2].clone()
        };
        let mut t = Matrix::zeros(m, m);
        for (j, k) in pattern(m, i) {
            let at = |t: &Matrix, r: usize, c: usize| t[(r - 1, c - 1)];
            let mut s = 0.0;
            for l in 1..=m {
                s += at(&t, j + 1, l) * q(l, k);
            }
            for l in (j + 1)..=m {
                s -= q(j + 1, l) * at(&t, l, k);
            }
            s += at(&prev, j + 1, k) * (dm - d(k));
            t[(j - 1, k - 1)] = s / q(j + 1, j);
        }
        tbars.push(t);
    }
    Ok(TransformFamily {
        m,
        sigma: sig.sigma,
        sigma_bar: sig.sigma_bar,
        tbars,
    })
}

impl TransformFamily {
    /// T_n = I + Σ λⁱ T̄_i by Horner's rule.
    pub fn assemble_tn(&self, lambda: f64) -> Matrix {
        let mut s = Matrix::zeros(self.m, self.m);
        for t in self.tbars.iter().rev() {
            s = &s.scale(lambda) + t;
        }
        &Matrix::identity(self.m) + &s.scale(lambda)
    }

    /// Per-coefficient residuals ‖(I−BBᵀ)(QT̄_i − T̄_iQ + T̄_{i−1}(D − d_mI))‖ with their bounds.
    pub fn sylvester_residuals(&self, spec: &PlantSpec) -> Vec<(f64, f64)> {
        let q = &spec.reaction;
        let shift = Matrix::diag(
            &spec
                .diffusion
                .iter()
                .map(|d| d - spec.d_last())
                .collect::<Vec<_>>(),
        );
        let qn = q.norm_fro();
        (0..self.tbars.len())
            .map(|idx| {
                let t = &self.tbars[idx];
                let prev = if idx == 0 {
                    Matrix::identity(self.m)
                } else {
                    self.tbars[idx - 1].clone()
                };
                let r = &(&(q * t) - &(t * q)) + &(&prev * &shift);
                let res = project_out_input(r).norm_fro();
                (res, 1e-10 * (1.0 + qn * t.norm_fro()))
            })
            .collect()
    }

    /// ‖(I−BBᵀ)[(Q − λd_mI)S + S(λD − Q) + (D − d_mI)λ]‖ with S = Σ λⁱT̄_i.
    pub fn full_residual(&self, spec: &PlantSpec, lambda: f64) -> f64 {
        let m = self.m;
        let q = &spec.reaction;
        let dm = spec.d_last();
        let s = &self.assemble_tn(lambda) - &Matrix::identity(m);
        let left = q - &Matrix::identity(m).scale(lambda * dm);
        let right = &spec.diffusion_matrix().scale(lambda) - q;
        let shift = Matrix::diag(
            &spec
                .diffusion
                .iter()
                .map(|d| (d - dm) * lambda)
                .collect::<Vec<_>>(),
        );
        let r = &(&(&left * &s) + &(&s * &right)) + &shift;
        project_out_input(r).norm_fro()
    }

    /// Maximum full residual over the supplied λ values, rejecting any above
    /// 1e-8·(1 + λ^{σ̄+1})·‖Q‖.
    pub fn certify_full_residual(&self, spec: &PlantSpec, lambdas: &[f64]) -> Result<f64> {
        let qn = spec.reaction.norm_fro().max(f64::MIN_POSITIVE);
        let mut worst: f64 = 0.0;
        for &lambda in lambdas {
            let residual = self.full_residual(spec, lambda);
            let bound = 1e-8 * (1.0 + lambda.powi(self.sigma_bar as i32 + 1)) * qn;
            if residual > bound {
                return Err(Error::ResidualExceeded {
                    lambda,
                    residual,
                    bound,
                });
            }
            worst = worst.max(residual);
        }
        Ok(worst)
    }

    /// True when no T̄_i has a nonzero outside its sparsity pattern.
    pub fn respects_pattern(&self) -> bool {
        self.tbars.iter().enumerate().all(|(idx, t)| {
            (1..=self.m).all(|j| {
                (1..=self.m).all(|k| in_pattern(self.m, idx + 1, j, k) || t[(j - 1, k - 1)] == 0.0)
            })
        })
    }
}

/// Independent solve of each Sylvester equation as a flat least-squares
/// system in the pattern unknowns, via vec(QX − XQ) = (I⊗Q − Qᵀ⊗I)vec(X).
pub fn brute_force_sylvester(spec: &PlantSpec) -> Result<TransformFamily> {
    spec.ensure_valid()?;
    let m = spec.m();
    let sig = spec.sigma_index();
    let q = &spec.reaction;
    let eye = Matrix::identity(m);
    let op = &eye.kron(q) - &q.transpose().kron(&eye);
    let shift = Matrix::diag(
        &spec
            .diffusion
            .iter()
            .map(|d| d - spec.d_last())
            .collect::<Vec<_>>(),
    );
    // rows 2..m of every column, column-major
    let eq_rows: Vec<usize> = (0..m)
        .flat_map(|k| (1..m).map(move |r| k * m + r))
        .collect();
    let mut tbars: Vec<Matrix> = Vec::new();
    for i in 1..=sig.sigma_bar {
        let prev = if i == 1 {
            eye.clone()
        } else {
            tbars[i - 2].clone()
        };
        let rhs_mat = &prev * &shift;
        let rhs: Vec<f64> = eq_rows
            .iter()
            .map(|&idx| -rhs_mat[(idx % m, idx / m)])
            .collect();
        let unknowns = pattern(m, i);
        let mut t = Matrix::zeros(m, m);
        if !unknowns.is_empty() {
            let a = Matrix::from_fn(eq_rows.len(), unknowns.len(), |r, c| {
                let (j, k) = unknowns[c];
                op[(eq_rows[r], (k - 1) * m + (j - 1))]
            });
            let x = least_squares(&a, &rhs)?;
            for ((j, k), v) in unknowns.iter().zip(x) {
                t[(j - 1, k - 1)] = v;
            }
        }
        tbars.push(t);
    }
    Ok(TransformFamily {
        m,
        sigma: sig.sigma,
        sigma_bar: sig.sigma_bar,
        tbars,
    })
}
