//! Boundary-actuation synthesis through a dynamic extension: lifting
//! frequencies μ_j, the projection matrix Ψ and its closed-form inverse,
//! and the controller state law for X = col{u, r_1, …, r_{m−1}}.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::certificate::{Certificate, Check};
use crate::error::{Error, Mu0Trial, Result};
use crate::internal::{dissipation_matrix, minimal_mode_count};
use crate::linalg::{eigenvalues, inverse, symmetric_eigen, Matrix, Tolerances};
use crate::model::{Actuation, PlantSpec};
use crate::sim;
use crate::spectral::{PsiFunction, SpectralBasis};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryDesign {
    /// Target decay rate δ₀.
    pub delta0: f64,
    /// Fixed k_Q; computed from the stabilizability test when absent.
    #[serde(default)]
    pub k_q: Option<f64>,
    /// Fixed μ0; found by the integer sweep when absent.
    #[serde(default)]
    pub mu0: Option<u32>,
    #[serde(default)]
    pub n_override: Option<usize>,
    #[serde(default = "default_cap")]
    pub mode_cap: usize,
    #[serde(default = "default_mu0_cap")]
    pub mu0_cap: u32,
}

fn default_cap() -> usize {
    Tolerances::MODE_CAP
}

fn default_mu0_cap() -> u32 {
    Tolerances::MU0_CAP
}

impl BoundaryDesign {
    pub fn new(delta0: f64) -> Self {
        Self {
            delta0,
            k_q: None,
            mu0: None,
            n_override: None,
            mode_cap: default_cap(),
            mu0_cap: default_mu0_cap(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InverseMethod {
    ClosedForm,
    Lu,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundaryController {
    pub n_modes: usize,
    pub minimal_n: usize,
    pub k_q: f64,
    pub delta0: f64,
    pub mu0: u32,
    pub mus: Vec<f64>,
    #[serde(skip)]
    pub psis: Vec<PsiFunction>,
    pub psi: Matrix,
    pub psi_inv: Matrix,
    pub inverse_method: InverseMethod,
    pub h: Matrix,
    pub theta: Matrix,
    /// N × mN gain K.
    pub gain: Matrix,
    /// Ẋ = x_law·X + z_law·Z_N.
    pub x_law: Matrix,
    pub z_law: Matrix,
}

/// μ_1..μ_N with √μ_j = √μ̄_j + 2μ0π/L.
pub fn choose_mus(basis: &SpectralBasis, n_modes: usize, mu0: u32) -> Result<Vec<f64>> {
    if mu0 == 0 {
        return Err(Error::Mu0Domain);
    }
    let step = PI / basis.length;
    let mixed = basis.kind.mixed();
    (1..=n_modes)
        .map(|j| {
            let base = if mixed { j as f64 } else { j as f64 - 0.5 };
            let mu = ((base + 2.0 * mu0 as f64) * step).powi(2);
            let (n, lambda) = basis.nearest_mode(mu);
            if (mu - lambda).abs() < Tolerances::MU_SEPARATION {
                return Err(Error::MuCollision { j, mu, n, lambda });
            }
            Ok(mu)
        })
        .collect()
}

/// Ψ with entry (n, j) = ψ_{j,n}.
pub fn psi_matrix(basis: &SpectralBasis, mus: &[f64], n_rows: usize) -> Result<Matrix> {
    let psis: Vec<PsiFunction> = mus.iter().map(|&mu| basis.psi(mu)).collect::<Result<_>>()?;
    let mut m = Matrix::zeros(n_rows, mus.len());
    for n in 0..n_rows {
        for (j, p) in psis.iter().enumerate() {
            m[(n, j)] = p.project(n + 1)?;
        }
    }
    Ok(m)
}

/// Ψ⁻¹ from the Cauchy-matrix product formula, evaluated in log-magnitude
/// with a tracked sign. Falls back to LU if the result is not finite.
pub fn psi_inverse_closed_form(
    basis: &SpectralBasis,
    mus: &[f64],
) -> Result<(Matrix, InverseMethod)> {
    let n = mus.len();
    let lambdas = basis.eigenvalues(n);
    let beta: Vec<f64> = (1..=n)
        .map(|k| basis.boundary_flux(k))
        .collect::<Result<_>>()?;
    let mut out = Matrix::zeros(n, n);
    let mut finite = true;
    for i in 0..n {
        for k in 0..n {
            let mut log = 0.0;
            let mut neg = false;
            let mut acc = |v: f64, num: bool| {
                log += if num { v.abs().ln() } else { -v.abs().ln() };
                neg ^= v < 0.0;
            };
            for l in 0..n {
                acc(lambdas[k] - mus[l], true);
                acc(lambdas[l] - mus[i], true);
            }
            acc(mus[i] - lambdas[k], false);
            for l in 0..n {
                if l != k {
                    acc(lambdas[l] - lambdas[k], false);
                }
                if l != i {
                    acc(mus[i] - mus[l], false);
                }
            }
            acc(beta[k], false);
            let v = log.exp();
            finite &= v.is_finite();
            out[(i, k)] = if neg { -v } else { v };
        }
    }
    if finite {
        Ok((out, InverseMethod::ClosedForm))
    } else {
        log::warn!("closed-form inverse overflowed at N = {n}; using LU");
        let psi = psi_matrix(basis, mus, n)?;
        Ok((inverse(&psi)?, InverseMethod::Lu))
    }
}

/// min eig Sym(ΨMΨ⁻¹) − k_Q.
pub fn lift_margin(psi: &Matrix, psi_inv: &Matrix, mus: &[f64], k_q: f64) -> Result<f64> {
    let s = (&(psi * &Matrix::diag(mus)) * psi_inv).sym();
    Ok(symmetric_eigen(&s)?.min() - k_q)
}

/// H̄ = −blkdiag{d₁ΨMΨ⁻¹, d₂Λ, …, d_mΛ} + Q⊗I_N.
pub fn hbar(
    spec: &PlantSpec,
    basis: &SpectralBasis,
    psi: &Matrix,
    psi_inv: &Matrix,
    mus: &[f64],
) -> Matrix {
    let n = mus.len();
    let lam = Matrix::diag(&basis.eigenvalues(n));
    let first = (&(psi * &Matrix::diag(mus)) * psi_inv).scale(spec.d(0));
    let mut blocks = vec![first];
    for i in 1..spec.m() {
        blocks.push(lam.scale(spec.d(i)));
    }
    &spec.reaction.kron(&Matrix::identity(n)) - &Matrix::block_diag(&blocks)
}

/// max eig Sym(H̄) + δ₀.
pub fn h_margin(
    spec: &PlantSpec,
    basis: &SpectralBasis,
    psi: &Matrix,
    psi_inv: &Matrix,
    mus: &[f64],
    delta0: f64,
) -> Result<f64> {
    Ok(symmetric_eigen(&hbar(spec, basis, psi, psi_inv, mus).sym())?.max() + delta0)
}

/// Smallest μ0 ≤ cap meeting both the lifting inequality and Sym(H̄) ≺ −δ₀I.
pub fn search_mu0(
    spec: &PlantSpec,
    basis: &SpectralBasis,
    n_modes: usize,
    k_q: f64,
    delta0: f64,
    cap: u32,
) -> Result<(u32, Vec<Mu0Trial>)> {
    let mut trace = Vec::new();
    for mu0 in 1..=cap {
        let mus = choose_mus(basis, n_modes, mu0)?;
        let psi = psi_matrix(basis, &mus, n_modes)?;
        let (psi_inv, _) = psi_inverse_closed_form(basis, &mus)?;
        let lift = lift_margin(&psi, &psi_inv, &mus, k_q)?;
        let h = h_margin(spec, basis, &psi, &psi_inv, &mus, delta0)?;
        trace.push(Mu0Trial {
            mu0,
            lift_margin: lift,
            h_margin: h,
        });
        if lift > 0.0 && h < 0.0 {
            return Ok((mu0, trace));
        }
    }
    let best_margin = trace
        .iter()
        .map(|t| t.lift_margin)
        .fold(f64::NEG_INFINITY, f64::max);
    Err(Error::Mu0Exhausted {
        cap,
        best_margin,
        trace,
    })
}

/// Inputs fixed before the law is assembled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LawInputs {
    pub n_modes: usize,
    pub minimal_n: usize,
    pub k_q: f64,
    pub delta0: f64,
    pub mu0: u32,
}

/// Θ = col_n{I_m ⊗ Ψ_nᵀ}, with Ψ_nᵀ the n-th row of Ψ.
pub fn theta(psi: &Matrix, m: usize) -> Matrix {
    let n = psi.rows();
    let rows: Vec<Matrix> = (0..n)
        .map(|k| Matrix::identity(m).kron(&psi.block(k, 0, 1, psi.cols())))
        .collect();
    Matrix::vstack(&rows)
}

pub fn build_dynamic_law(
    spec: &PlantSpec,
    basis: &SpectralBasis,
    inputs: LawInputs,
) -> Result<BoundaryController> {
    let m = spec.m();
    let n = inputs.n_modes;
    let mus = choose_mus(basis, n, inputs.mu0)?;
    let psis: Vec<PsiFunction> = mus.iter().map(|&mu| basis.psi(mu)).collect::<Result<_>>()?;
    let psi = psi_matrix(basis, &mus, n)?;
    let (psi_inv, inverse_method) = psi_inverse_closed_form(basis, &mus)?;
    let lam = Matrix::diag(&basis.eigenvalues(n));
    let conj = &(&psi_inv * &lam) * &psi;
    let mut blocks = vec![Matrix::diag(&mus).scale(spec.d(0))];
    for i in 1..m {
        blocks.push(conj.scale(spec.d(i)));
    }
    let eye_n = Matrix::identity(n);
    let h = &spec.reaction.kron(&eye_n) - &Matrix::block_diag(&blocks);
    let theta = theta(&psi, m);
    let bt = spec.input().transpose();
    let gain = -(&psi_inv * &eye_n.kron(&bt.scale(spec.d(0) * inputs.k_q)));
    let b_lift = spec.input().kron(&eye_n);
    let x_law = &h + &(&(&b_lift * &gain) * &theta);
    let z_law = -(&b_lift * &gain);
    Ok(BoundaryController {
        n_modes: n,
        minimal_n: inputs.minimal_n,
        k_q: inputs.k_q,
        delta0: inputs.delta0,
        mu0: inputs.mu0,
        mus,
        psis,
        psi,
        psi_inv,
        inverse_method,
        h,
        theta,
        gain,
        x_law,
        z_law,
    })
}

/// Full pipeline: stabilizability, mode count, μ0 and the law.
pub fn synthesize(spec: &PlantSpec, design: &BoundaryDesign) -> Result<BoundaryController> {
    if spec.actuation != Actuation::Boundary {
        return Err(Error::WrongActuation {
            expected: "boundary",
        });
    }
    spec.ensure_valid()?;
    let basis = SpectralBasis::from_plant(spec)?;
    let lambda1 = basis.eigenvalue(1)?;
    let k_q = match design.k_q {
        Some(k) => {
            let margin = spec.stabilizability_margin(k, design.delta0, lambda1)?;
            if margin > -Tolerances::DEFINITENESS {
                return Err(Error::Infeasible {
                    reason: format!("k_Q = {k} does not satisfy the stabilizability test"),
                    eigenvalue: margin,
                });
            }
            k
        }
        None => spec.check_boundary_stabilizability(design.delta0, lambda1)?,
    };
    let minimal_n = select_mode_count_boundary(spec, &basis, design.delta0, design.mode_cap)?;
    let n_modes = match design.n_override {
        Some(n) if n < minimal_n => {
            return Err(Error::ModeOverride {
                requested: n,
                minimal: minimal_n,
            })
        }
        Some(n) if n > design.mode_cap => {
            return Err(Error::ModeCap {
                cap: design.mode_cap,
            })
        }
        Some(n) => n,
        None => minimal_n,
    };
    let mu0 = match design.mu0 {
        Some(mu0) => mu0,
        None => search_mu0(spec, &basis, n_modes, k_q, design.delta0, design.mu0_cap)?.0,
    };
    build_dynamic_law(
        spec,
        &basis,
        LawInputs {
            n_modes,
            minimal_n,
            k_q,
            delta0: design.delta0,
            mu0,
        },
    )
}

pub fn select_mode_count_boundary(
    spec: &PlantSpec,
    basis: &SpectralBasis,
    delta0: f64,
    cap: usize,
) -> Result<usize> {
    if !(delta0 > 0.0 && delta0.is_finite()) {
        return Err(Error::Argument(format!(
            "decay rate {delta0} must be positive"
        )));
    }
    minimal_mode_count(spec, basis, delta0, cap)
}

impl BoundaryController {
    /// Closed first-mode block blkdiag_n{Q − D·diag{λ_n + k_Q, λ_n, …, λ_n}}.
    pub fn pi1(&self, spec: &PlantSpec, basis: &SpectralBasis) -> Result<Matrix> {
        let blocks: Vec<Matrix> = (1..=self.n_modes)
            .map(|n| {
                let lambda = basis.eigenvalue(n)?;
                let mut w = vec![lambda; spec.m()];
                w[0] += self.k_q;
                let dw: Vec<f64> = w.iter().zip(&spec.diffusion).map(|(a, b)| a * b).collect();
                Ok(&spec.reaction - &Matrix::diag(&dw))
            })
            .collect::<Result<_>>()?;
        Ok(Matrix::block_diag(&blocks))
    }

    pub fn hbar(&self, spec: &PlantSpec, basis: &SpectralBasis) -> Matrix {
        hbar(spec, basis, &self.psi, &self.psi_inv, &self.mus)
    }
}

/// Π₁ and H̄ dissipativity, residual modes, closed-loop abscissa and the
/// lifting inequality, plus informational consistency checks.
pub fn certify_boundary(
    spec: &PlantSpec,
    ctrl: &BoundaryController,
    basis: &SpectralBasis,
    n_sim: usize,
) -> Result<Certificate> {
    let d0 = ctrl.delta0;
    let n = ctrl.n_modes;
    let mut pi_worst = f64::NEG_INFINITY;
    for k in 1..=n {
        let s = spec.stabilizability_matrix(ctrl.k_q, d0, basis.eigenvalue(k)?);
        pi_worst = pi_worst.max(symmetric_eigen(&s)?.max());
    }
    let hb = ctrl.hbar(spec, basis);
    let h_sym = symmetric_eigen(&hb.sym())?.max();
    let h_abscissa = eigenvalues(&hb)?.max_real();
    let mut residual_worst = f64::NEG_INFINITY;
    for k in (n + 1)..=n_sim.max(n + 1) {
        let s = dissipation_matrix(spec, basis.eigenvalue(k)?, d0);
        residual_worst = residual_worst.max(symmetric_eigen(&s)?.max());
    }
    let sys = sim::assemble_boundary(spec, ctrl, basis, n_sim)?;
    let abscissa = eigenvalues(&sys.acl)?.max_real();
    let lift = lift_margin(&ctrl.psi, &ctrl.psi_inv, &ctrl.mus, ctrl.k_q)?;
    let product_err = (&ctrl.psi * &ctrl.psi_inv).max_abs_diff(&Matrix::identity(n));
    let tiny = -f64::MIN_POSITIVE;
    Ok(Certificate::new(vec![
        Check::at_most(
            "pi1 dissipativity",
            pi_worst,
            tiny,
            "max eig Sym(Q) - D diag(k_Q, lambda_n, ...) + delta0",
        ),
        Check::at_most(
            "hbar dissipativity",
            h_sym + d0,
            tiny,
            "max eig Sym(Hbar) + delta0",
        ),
        Check::at_most(
            "residual-mode dissipativity",
            residual_worst,
            tiny,
            format!("max eig over modes {}..{}", n + 1, n_sim.max(n + 1)),
        ),
        Check::at_most(
            "closed-loop abscissa",
            abscissa,
            -d0 * (1.0 - Tolerances::ABSCISSA_SLACK),
            format!("N_sim = {n_sim}"),
        ),
        Check::above(
            "lifting inequality",
            lift,
            0.0,
            "min eig Sym(Psi M Psi^-1) - k_Q",
        ),
        Check::at_most(
            "hbar spectral abscissa",
            h_abscissa,
            -d0,
            "eigenvalues of Hbar",
        )
        .informational(),
        Check::at_most(
            "psi inverse product",
            product_err,
            1e-8,
            "max |Psi Psi^-1 - I|",
        )
        .informational(),
    ]))
}
