//! Distributed-actuation synthesis: mode count, K_Q with its Lyapunov
//! certificate, per-mode gains and the assembled feedback matrix.

use serde::{Deserialize, Serialize};

use crate::certificate::{Certificate, Check};
use crate::error::{Error, Result};
use crate::linalg::{
    ackermann_place, eigenvalues, inverse, is_negative_definite, lyapunov_solve, symmetric_eigen,
    Matrix, Spectrum, Tolerances,
};
use crate::model::{Actuation, PlantSpec};
use crate::sim;
use crate::spectral::{ShapeMatrix, SpectralBasis};
use crate::transform::{build_transform, TransformFamily};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InternalDesign {
    /// Target decay rate δ > 0.
    pub delta: f64,
    /// Spacing g of the placed poles −(δ − λ₁d_m) − g·r.
    #[serde(default = "default_gap")]
    pub pole_gap: f64,
    /// Mode count at or above the minimal admissible one.
    #[serde(default)]
    pub n_override: Option<usize>,
    #[serde(default = "default_cap")]
    pub mode_cap: usize,
}

fn default_gap() -> f64 {
    1.0
}

fn default_cap() -> usize {
    Tolerances::MODE_CAP
}

impl InternalDesign {
    pub fn new(delta: f64) -> Self {
        Self {
            delta,
            pole_gap: default_gap(),
            n_override: None,
            mode_cap: default_cap(),
        }
    }
}

/// K_Q placing Q + BK_Q, with P solving the shifted Lyapunov equation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilizingGain {
    pub k_q: Matrix,
    pub p: Matrix,
    pub poles: Vec<f64>,
    /// δ − λ₁d_m.
    pub shift: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct InternalController {
    pub n_modes: usize,
    pub minimal_n: usize,
    pub delta: f64,
    pub pole_gap: f64,
    pub k_q: Matrix,
    pub p: Matrix,
    pub poles: Vec<f64>,
    pub family: TransformFamily,
    pub kbars: Vec<Matrix>,
    pub shape: ShapeMatrix,
    pub binv: Matrix,
    /// N × mN feedback, u = K·col(z_1..z_N).
    pub gain: Matrix,
}

/// −λD + Sym(Q) + δI ≺ 0.
pub fn dissipative_at(spec: &PlantSpec, lambda: f64, delta: f64) -> Result<bool> {
    Ok(is_negative_definite(
        &dissipation_matrix(spec, lambda, delta),
        0.0,
    )?)
}

pub fn dissipation_matrix(spec: &PlantSpec, lambda: f64, delta: f64) -> Matrix {
    let mut s = spec.reaction.sym();
    for i in 0..spec.m() {
        s[(i, i)] += delta - lambda * spec.diffusion[i];
    }
    s
}

/// Smallest N ≥ 1 such that modes beyond N are δ-dissipative.
pub fn select_mode_count(
    spec: &PlantSpec,
    basis: &SpectralBasis,
    delta: f64,
    cap: usize,
) -> Result<usize> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Argument(format!(
            "decay rate {delta} must be positive"
        )));
    }
    minimal_mode_count(spec, basis, delta, cap)
}

pub(crate) fn minimal_mode_count(
    spec: &PlantSpec,
    basis: &SpectralBasis,
    delta: f64,
    cap: usize,
) -> Result<usize> {
    for n in 0..=cap {
        if dissipative_at(spec, basis.eigenvalue(n + 1)?, delta)? {
            return Ok(n.max(1));
        }
    }
    Err(Error::ModeCap { cap })
}

pub fn synthesize_kq(
    spec: &PlantSpec,
    delta: f64,
    lambda1: f64,
    gap: f64,
) -> Result<StabilizingGain> {
    if !(gap > 0.0 && gap.is_finite()) {
        return Err(Error::Argument(format!("pole gap {gap} must be positive")));
    }
    let m = spec.m();
    let shift = delta - lambda1 * spec.d_last();
    let poles: Vec<f64> = (1..=m).map(|r| -shift - gap * r as f64).collect();
    let b = spec.input();
    let k_q = ackermann_place(&spec.reaction, &b, &poles)?;
    let closed = &spec.reaction + &(&b * &k_q);
    let shifted = &closed + &Matrix::identity(m).scale(shift);
    let p = lyapunov_solve(&shifted)?;
    Ok(StabilizingGain {
        k_q,
        p,
        poles,
        shift,
    })
}

impl StabilizingGain {
    /// Largest eigenvalue of Sym(P(Q + BK_Q)) + (δ − λ₁d_m)P.
    pub fn certificate_margin(&self, spec: &PlantSpec) -> Result<f64> {
        let closed = &spec.reaction + &(&spec.input() * &self.k_q);
        let s = &(&self.p * &closed).sym() + &self.p.scale(self.shift);
        Ok(symmetric_eigen(&s)?.max())
    }
}

/// K̄_n = Bᵀ[(Q − λ_n d_m I)T_n + T_n(λ_n D − Q)] + K_Q T_n for n = 1..N.
pub fn per_mode_gains(
    spec: &PlantSpec,
    family: &TransformFamily,
    basis: &SpectralBasis,
    k_q: &Matrix,
    n_modes: usize,
) -> Result<Vec<Matrix>> {
    let m = spec.m();
    let q = &spec.reaction;
    let dm = spec.d_last();
    (1..=n_modes)
        .map(|n| {
            let lambda = basis.eigenvalue(n)?;
            let t = family.assemble_tn(lambda);
            let left = q - &Matrix::identity(m).scale(lambda * dm);
            let right = &spec.diffusion_matrix().scale(lambda) - q;
            let inner = &(&left * &t) + &(&t * &right);
            let first_row = inner.block(0, 0, 1, m);
            Ok(&first_row + &(k_q * &t))
        })
        .collect()
}

/// K = 𝓑⁻¹ · blkdiag{K̄_1, …, K̄_N}.
pub fn assemble_gain(binv: &Matrix, kbars: &[Matrix]) -> Result<Matrix> {
    if binv.shape() != (kbars.len(), kbars.len()) {
        return Err(Error::Argument(format!(
            "inverse shape matrix is {}x{}, expected {n}x{n}",
            binv.rows(),
            binv.cols(),
            n = kbars.len()
        )));
    }
    Ok(binv * &Matrix::block_diag(kbars))
}

pub fn synthesize(spec: &PlantSpec, design: &InternalDesign) -> Result<InternalController> {
    if spec.actuation != Actuation::Internal {
        return Err(Error::WrongActuation {
            expected: "internal",
        });
    }
    spec.ensure_valid()?;
    let basis = SpectralBasis::from_plant(spec)?;
    let minimal_n = select_mode_count(spec, &basis, design.delta, design.mode_cap)?;
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
    let family = build_transform(spec)?;
    family.certify_full_residual(spec, &basis.eigenvalues(n_modes))?;
    let gain0 = synthesize_kq(spec, design.delta, basis.eigenvalue(1)?, design.pole_gap)?;
    let kbars = per_mode_gains(spec, &family, &basis, &gain0.k_q, n_modes)?;
    let shape = basis.shape_matrix(&spec.shapes, n_modes)?;
    let binv = inverse(&shape.matrix)?;
    let gain = assemble_gain(&binv, &kbars)?;
    Ok(InternalController {
        n_modes,
        minimal_n,
        delta: design.delta,
        pole_gap: design.pole_gap,
        k_q: gain0.k_q,
        p: gain0.p,
        poles: gain0.poles,
        family,
        kbars,
        shape,
        binv,
        gain,
    })
}

impl InternalController {
    pub fn stabilizing_gain(
        &self,
        spec: &PlantSpec,
        basis: &SpectralBasis,
    ) -> Result<StabilizingGain> {
        Ok(StabilizingGain {
            k_q: self.k_q.clone(),
            p: self.p.clone(),
            poles: self.poles.clone(),
            shift: self.delta - basis.eigenvalue(1)? * spec.d_last(),
        })
    }

    /// Spectrum of −λ_nD + Q + BK̄_n.
    pub fn mode_spectrum(
        &self,
        spec: &PlantSpec,
        basis: &SpectralBasis,
        n: usize,
    ) -> Result<Spectrum> {
        let lambda = basis.eigenvalue(n)?;
        let a = &(&spec.reaction - &spec.diffusion_matrix().scale(lambda))
            + &(&spec.input() * &self.kbars[n - 1]);
        Ok(eigenvalues(&a)?)
    }
}

/// Spectrum similarity, per-mode decay, residual dissipativity, closed-loop
/// abscissa and the Lyapunov certificate.
pub fn certify_internal(
    spec: &PlantSpec,
    ctrl: &InternalController,
    basis: &SpectralBasis,
    n_sim: usize,
) -> Result<Certificate> {
    let delta = ctrl.delta;
    let b = spec.input();
    let target = eigenvalues(&(&spec.reaction + &(&b * &ctrl.k_q)))?;
    let mut sim_err: f64 = 0.0;
    let mut worst_re = f64::NEG_INFINITY;
    for n in 1..=ctrl.n_modes {
        let lambda = basis.eigenvalue(n)?;
        let got = ctrl.mode_spectrum(spec, basis, n)?;
        let shifted = Spectrum {
            eigenvalues: target
                .eigenvalues
                .iter()
                .map(|z| crate::linalg::Complex::new(z.re - lambda * spec.d_last(), z.im))
                .collect(),
        };
        sim_err = sim_err.max(got.match_distance(&shifted));
        worst_re = worst_re.max(got.max_real());
    }
    let mut residual_worst = f64::NEG_INFINITY;
    for n in (ctrl.n_modes + 1)..=n_sim.max(ctrl.n_modes + 1) {
        let s = dissipation_matrix(spec, basis.eigenvalue(n)?, delta);
        residual_worst = residual_worst.max(symmetric_eigen(&s)?.max());
    }
    let sys = sim::assemble_internal(spec, ctrl, basis, n_sim)?;
    let abscissa = eigenvalues(&sys.acl)?.max_real();
    let lmi = ctrl
        .stabilizing_gain(spec, basis)?
        .certificate_margin(spec)?;
    Ok(Certificate::new(vec![
        Check::at_most(
            "spectrum similarity",
            sim_err,
            Tolerances::SIMILARITY,
            format!("modes 1..{}", ctrl.n_modes),
        ),
        Check::at_most(
            "controlled-mode decay",
            worst_re,
            -delta,
            "max Re over modes 1..N",
        ),
        Check::at_most(
            "residual-mode dissipativity",
            residual_worst,
            -f64::MIN_POSITIVE,
            format!(
                "max eig over modes {}..{}",
                ctrl.n_modes + 1,
                n_sim.max(ctrl.n_modes + 1)
            ),
        ),
        Check::at_most(
            "closed-loop abscissa",
            abscissa,
            -delta * (1.0 - Tolerances::ABSCISSA_SLACK),
            format!("N_sim = {n_sim}"),
        ),
        Check::at_most(
            "lyapunov certificate",
            lmi,
            -Tolerances::DEFINITENESS,
            "shifted LMI max eig",
        ),
    ]))
}
