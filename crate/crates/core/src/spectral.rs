//! Sturm–Liouville eigenpairs, modal projections and lifting functions.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{condition_one, determinant, Matrix, Tolerances};
use crate::model::{Actuation, PlantSpec, ShapeFn};
use crate::quadrature::{int_cos, int_sin, simpson_samples};

/// Left/right boundary type: N = Neumann, D = Dirichlet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BcKind {
    NN,
    ND,
    DN,
    DD,
}

impl BcKind {
    pub fn from_flags(left_dirichlet: bool, right_dirichlet: bool) -> Self {
        match (left_dirichlet, right_dirichlet) {
            (false, false) => BcKind::NN,
            (false, true) => BcKind::ND,
            (true, false) => BcKind::DN,
            (true, true) => BcKind::DD,
        }
    }

    pub fn left_dirichlet(self) -> bool {
        matches!(self, BcKind::DN | BcKind::DD)
    }

    pub fn right_dirichlet(self) -> bool {
        matches!(self, BcKind::ND | BcKind::DD)
    }

    /// Mixed type: one Dirichlet end and one Neumann end.
    pub fn mixed(self) -> bool {
        self.left_dirichlet() != self.right_dirichlet()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Trig {
    #[default]
    Cos,
    Sin,
}

/// amp · trig(freq · x).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wave {
    pub kind: Trig,
    pub freq: f64,
    pub amp: f64,
}

impl Wave {
    pub fn eval(&self, x: f64) -> f64 {
        match self.kind {
            Trig::Cos => self.amp * (self.freq * x).cos(),
            Trig::Sin => self.amp * (self.freq * x).sin(),
        }
    }

    pub fn deriv(&self, x: f64) -> f64 {
        match self.kind {
            Trig::Cos => -self.amp * self.freq * (self.freq * x).sin(),
            Trig::Sin => self.amp * self.freq * (self.freq * x).cos(),
        }
    }

    pub fn second_deriv(&self, x: f64) -> f64 {
        -self.freq * self.freq * self.eval(x)
    }

    /// ∫_a^b of the wave.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        match self.kind {
            Trig::Cos => self.amp * int_cos(self.freq, a, b),
            Trig::Sin => self.amp * int_sin(self.freq, a, b),
        }
    }

    /// ∫_0^L of the product of two waves, by product-to-sum identities.
    pub fn inner(&self, other: &Wave, length: f64) -> f64 {
        let (s, r) = (self.freq, other.freq);
        let ic = |w: f64| int_cos(w, 0.0, length);
        let is = |w: f64| int_sin(w, 0.0, length);
        let v = match (self.kind, other.kind) {
            (Trig::Cos, Trig::Cos) => 0.5 * (ic(s - r) + ic(s + r)),
            (Trig::Sin, Trig::Sin) => 0.5 * (ic(s - r) - ic(s + r)),
            (Trig::Sin, Trig::Cos) => 0.5 * (is(s + r) + is(s - r)),
            (Trig::Cos, Trig::Sin) => 0.5 * (is(s + r) + is(r - s)),
        };
        self.amp * other.amp * v
    }
}

/// Orthonormal eigenbasis of −∂ₓₓ on [0, L] under the given boundary type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralBasis {
    pub kind: BcKind,
    pub length: f64,
}

impl SpectralBasis {
    pub fn new(kind: BcKind, length: f64) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::Argument(format!(
                "domain length {length} must be positive"
            )));
        }
        Ok(Self { kind, length })
    }

    pub fn from_plant(spec: &PlantSpec) -> Result<Self> {
        Self::new(
            BcKind::from_flags(spec.left_dirichlet(), spec.right_dirichlet()),
            spec.length,
        )
    }

    fn sqrt_lambda_unchecked(&self, n: usize) -> f64 {
        let k = n as f64;
        let shift = match self.kind {
            BcKind::ND | BcKind::DN => k - 0.5,
            BcKind::DD => k,
            BcKind::NN => k - 1.0,
        };
        shift * PI / self.length
    }

    pub fn sqrt_eigenvalue(&self, n: usize) -> Result<f64> {
        if n < 1 {
            return Err(Error::ModeIndex(n));
        }
        Ok(self.sqrt_lambda_unchecked(n))
    }

    pub fn eigenvalue(&self, n: usize) -> Result<f64> {
        Ok(self.sqrt_eigenvalue(n)?.powi(2))
    }

    /// λ_1..λ_count.
    pub fn eigenvalues(&self, count: usize) -> Vec<f64> {
        (1..=count)
            .map(|n| self.sqrt_lambda_unchecked(n).powi(2))
            .collect()
    }

    pub fn wave(&self, n: usize) -> Result<Wave> {
        let freq = self.sqrt_eigenvalue(n)?;
        let kind = if self.kind.left_dirichlet() {
            Trig::Sin
        } else {
            Trig::Cos
        };
        let amp = if freq == 0.0 {
            1.0 / self.length.sqrt()
        } else {
            (2.0 / self.length).sqrt()
        };
        Ok(Wave { kind, freq, amp })
    }

    pub fn phi(&self, n: usize, x: f64) -> Result<f64> {
        Ok(self.wave(n)?.eval(x))
    }

    pub fn dphi(&self, n: usize, x: f64) -> Result<f64> {
        Ok(self.wave(n)?.deriv(x))
    }

    /// Boundary flux β_n = [ψφ'_n − ψ'φ_n](L) for a unit right-end lifting:
    /// φ_n'(L) at a Dirichlet right end, −φ_n(L) at a Neumann right end.
    pub fn boundary_flux(&self, n: usize) -> Result<f64> {
        let w = self.wave(n)?;
        Ok(if self.kind.right_dirichlet() {
            w.deriv(self.length)
        } else {
            -w.eval(self.length)
        })
    }

    /// Index n whose λ_n lies closest to `value`.
    pub fn nearest_mode(&self, value: f64) -> (usize, f64) {
        let r = value.max(0.0).sqrt() * self.length / PI;
        let guess = match self.kind {
            BcKind::ND | BcKind::DN => r + 0.5,
            BcKind::DD => r,
            BcKind::NN => r + 1.0,
        };
        let base = guess.floor().max(1.0) as usize;
        [base.saturating_sub(1).max(1), base, base + 1]
            .into_iter()
            .map(|n| (n, self.sqrt_lambda_unchecked(n).powi(2)))
            .min_by(|a, b| (a.1 - value).abs().total_cmp(&(b.1 - value).abs()))
            .expect("three candidates")
    }

    /// ψ(x) solving ψ″ + μψ = 0 with the homogeneous left condition and unit right condition.
    pub fn psi(&self, mu: f64) -> Result<PsiFunction> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::Argument(format!("mu = {mu} must be positive")));
        }
        let (n, lambda) = self.nearest_mode(mu);
        if (mu - lambda).abs() <= 1e-9 * mu.max(1.0) {
            return Err(Error::MuCollision {
                j: 0,
                mu,
                n,
                lambda,
            });
        }
        let freq = mu.sqrt();
        let kind = if self.kind.left_dirichlet() {
            Trig::Sin
        } else {
            Trig::Cos
        };
        let unit = Wave {
            kind,
            freq,
            amp: 1.0,
        };
        let right = if self.kind.right_dirichlet() {
            unit.eval(self.length)
        } else {
            unit.deriv(self.length)
        };
        Ok(PsiFunction {
            mu,
            wave: Wave {
                kind,
                freq,
                amp: 1.0 / right,
            },
            basis: *self,
        })
    }

    /// b_{j,n} = ∫ b_j φ_n.
    pub fn project_shape(&self, shape: &ShapeFn, n: usize) -> Result<f64> {
        let w = self.wave(n)?;
        Ok(match shape {
            ShapeFn::Indicator { a, b } => w.integral(*a, *b),
            ShapeFn::Sampled { values } => self.project_samples(values, &w),
        })
    }

    fn project_samples(&self, values: &[f64], w: &Wave) -> f64 {
        if values.len() < 2 {
            return 0.0;
        }
        let h = self.length / (values.len() - 1) as f64;
        let prod: Vec<f64> = values
            .iter()
            .enumerate()
            .map(|(i, v)| v * w.eval(h * i as f64))
            .collect();
        simpson_samples(&prod, h)
    }

    /// 𝓑_{N×N} with entry (n, j) = b_{j,n}.
    pub fn shape_matrix(&self, shapes: &[ShapeFn], n_modes: usize) -> Result<ShapeMatrix> {
        if shapes.len() < n_modes {
            return Err(Error::NotEnoughShapes {
                needed: n_modes,
                got: shapes.len(),
            });
        }
        let mut m = Matrix::zeros(n_modes, n_modes);
        for n in 0..n_modes {
            for j in 0..n_modes {
                m[(n, j)] = self.project_shape(&shapes[j], n + 1)?;
            }
        }
        let row_norms: f64 = (0..n_modes)
            .map(|i| m.row_slice(i).iter().map(|v| v * v).sum::<f64>().sqrt())
            .product();
        let det = determinant(&m)?;
        let normalized_det = if row_norms > 0.0 {
            det.abs() / row_norms
        } else {
            0.0
        };
        if normalized_det < Tolerances::SHAPE_DETERMINANT {
            return Err(Error::ShapeSingular { normalized_det });
        }
        let condition = condition_one(&m)?;
        Ok(ShapeMatrix {
            matrix: m,
            determinant: det,
            normalized_det,
            condition,
        })
    }

    /// Projection of vector initial data onto φ_n.
    pub fn project_initial(&self, z0: &InitialCondition, n: usize) -> Result<ModalVector> {
        let w = self.wave(n)?;
        let values = match z0 {
            InitialCondition::Trig { components } => components
                .iter()
                .map(|terms| {
                    terms
                        .iter()
                        .map(|t| {
                            let tw = Wave {
                                kind: t.kind,
                                freq: t.freq,
                                amp: t.coef,
                            };
                            tw.inner(&w, self.length)
                        })
                        .sum()
                })
                .collect(),
            InitialCondition::Sampled { components } => components
                .iter()
                .map(|vals| self.project_samples(vals, &w))
                .collect(),
        };
        Ok(ModalVector { n, values })
    }
}

/// Projection matrix with its conditioning report.
#[derive(Debug, Clone, Serialize)]
pub struct ShapeMatrix {
    pub matrix: Matrix,
    pub determinant: f64,
    /// |det| divided by the product of row norms (Hadamard ratio, ≤ 1).
    pub normalized_det: f64,
    pub condition: f64,
}

/// Lifting function ψ for one μ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PsiFunction {
    pub mu: f64,
    pub wave: Wave,
    #[serde(skip)]
    basis: SpectralBasis,
}

/// Residuals of the lifting boundary-value problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PsiResiduals {
    pub ode: f64,
    pub left: f64,
    pub right: f64,
}

impl PsiFunction {
    pub fn eval(&self, x: f64) -> f64 {
        self.wave.eval(x)
    }

    pub fn deriv(&self, x: f64) -> f64 {
        self.wave.deriv(x)
    }

    /// ψ_{j,n} = ⟨ψ, φ_n⟩.
    pub fn project(&self, n: usize) -> Result<f64> {
        Ok(self.wave.inner(&self.basis.wave(n)?, self.basis.length))
    }

    pub fn residuals(&self) -> PsiResiduals {
        let b = self.basis;
        let l = b.length;
        let scale = self.wave.amp.abs() * self.mu.max(1.0);
        let ode = (0..=64)
            .map(|k| {
                let x = l * k as f64 / 64.0;
                (self.wave.second_deriv(x) + self.mu * self.eval(x)).abs()
            })
            .fold(0.0, f64::max)
            / scale;
        let left = if b.kind.left_dirichlet() {
            self.eval(0.0)
        } else {
            self.deriv(0.0)
        };
        let right = if b.kind.right_dirichlet() {
            self.eval(l)
        } else {
            self.deriv(l)
        };
        PsiResiduals {
            ode,
            left: left.abs(),
            right: (right - 1.0).abs(),
        }
    }
}

/// ψ for a boundary-actuated plant.
pub fn psi_function(spec: &PlantSpec, mu: f64) -> Result<PsiFunction> {
    if spec.actuation != Actuation::Boundary {
        return Err(Error::WrongActuation {
            expected: "boundary",
        });
    }
    SpectralBasis::from_plant(spec)?.psi(mu)
}

/// coef · trig(freq · x).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigTerm {
    pub coef: f64,
    pub freq: f64,
    #[serde(default)]
    pub kind: Trig,
}

/// Vector initial data z⁰(x), one entry per PDE component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialCondition {
    Trig {
        components: Vec<Vec<TrigTerm>>,
    },
    /// Uniform-grid samples over [0, L].
    Sampled {
        components: Vec<Vec<f64>>,
    },
}

impl InitialCondition {
    pub fn components(&self) -> usize {
        match self {
            InitialCondition::Trig { components } => components.len(),
            InitialCondition::Sampled { components } => components.len(),
        }
    }

    pub fn zero(m: usize) -> Self {
        InitialCondition::Trig {
            components: vec![vec![]; m],
        }
    }

    pub fn eval(&self, i: usize, x: f64, length: f64) -> f64 {
        match self {
            InitialCondition::Trig { components } => components[i]
                .iter()
                .map(|t| {
                    Wave {
                        kind: t.kind,
                        freq: t.freq,
                        amp: t.coef,
                    }
                    .eval(x)
                })
                .sum(),
            InitialCondition::Sampled { components } => {
                let v = &components[i];
                let h = length / (v.len() - 1) as f64;
                let s = (x / h).clamp(0.0, (v.len() - 1) as f64);
                let k = (s.floor() as usize).min(v.len() - 2);
                let f = s - k as f64;
                v[k] * (1.0 - f) + v[k + 1] * f
            }
        }
    }
}

/// Modal coefficients of one mode across the m components.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModalVector {
    pub n: usize,
    pub values: Vec<f64>,
}
