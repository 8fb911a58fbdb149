//! Plant description, structural validation and the boundary stabilizability test.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, Matrix, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Actuation {
    Internal,
    Boundary,
}

/// Boundary coefficients γ₁₁z(0) + γ₁₂z_x(0) = 0, γ₂₁z(L) + γ₂₂z_x(L) = u.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct Gamma {
    pub g11: f64,
    pub g12: f64,
    pub g21: f64,
    pub g22: f64,
}

impl Gamma {
    pub const NEUMANN_DIRICHLET: Gamma = Gamma {
        g11: 0.0,
        g12: 1.0,
        g21: 1.0,
        g22: 0.0,
    };

    pub fn new(g11: f64, g12: f64, g21: f64, g22: f64) -> Self {
        Self { g11, g12, g21, g22 }
    }

    /// Pure Dirichlet/Neumann pair from the left and right Dirichlet flags.
    pub fn from_flags(left_dirichlet: bool, right_dirichlet: bool) -> Self {
        let l = f64::from(u8::from(left_dirichlet));
        let r = f64::from(u8::from(right_dirichlet));
        Self::new(l, 1.0 - l, r, 1.0 - r)
    }
}

impl From<[f64; 4]> for Gamma {
    fn from(g: [f64; 4]) -> Self {
        Self::new(g[0], g[1], g[2], g[3])
    }
}

impl From<Gamma> for [f64; 4] {
    fn from(g: Gamma) -> Self {
        [g.g11, g.g12, g.g21, g.g22]
    }
}

/// Spatial distribution of one internal actuator on [0, L].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ShapeFn {
    /// Indicator of [a, b].
    Indicator { a: f64, b: f64 },
    /// Values on a uniform grid spanning [0, L].
    Sampled { values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantSpec {
    pub length: f64,
    pub diffusion: Vec<f64>,
    pub reaction: Matrix,
    pub actuation: Actuation,
    pub gamma: Gamma,
    #[serde(default)]
    pub shapes: Vec<ShapeFn>,
    /// Relative tolerance for treating diffusions as equal when computing σ.
    #[serde(default)]
    pub sigma_tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Violation {
    Dimension(String),
    NonPositiveLength(f64),
    NonPositiveDiffusion { index: usize, value: f64 },
    NonFinite(String),
    CascadeStructure { row: usize, col: usize },
    ZeroSubdiagonal { row: usize, col: usize },
    BoundaryCoefficients(String),
    Shape { index: usize, reason: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Dimension(s) => write!(f, "dimension: {s}"),
            Violation::NonPositiveLength(l) => write!(f, "domain length {l} is not positive"),
            Violation::NonPositiveDiffusion { index, value } => {
                write!(f, "diffusion d_{index} = {value} is not positive")
            }
            Violation::NonFinite(s) => write!(f, "non-finite value in {s}"),
            Violation::CascadeStructure { row, col } => {
                write!(f, "cascade structure at ({row},{col})")
            }
            Violation::ZeroSubdiagonal { row, col } => {
                write!(f, "controllability: zero subdiagonal at ({row},{col})")
            }
            Violation::BoundaryCoefficients(s) => write!(f, "boundary coefficients: {s}"),
            Violation::Shape { index, reason } => write!(f, "shape {index}: {reason}"),
        }
    }
}

/// Diffusion-distinctness index σ and the transformation degree σ̄.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SigmaIndex {
    pub sigma: usize,
    pub sigma_bar: usize,
}

impl PlantSpec {
    pub fn m(&self) -> usize {
        self.diffusion.len()
    }

    pub fn d(&self, i: usize) -> f64 {
        self.diffusion[i]
    }

    pub fn d_last(&self) -> f64 {
        *self.diffusion.last().expect("non-empty diffusion")
    }

    pub fn diffusion_matrix(&self) -> Matrix {
        Matrix::diag(&self.diffusion)
    }

    /// The input column e₁.
    pub fn input(&self) -> Matrix {
        Matrix::unit(self.m(), 0)
    }

    pub fn left_dirichlet(&self) -> bool {
        self.gamma.g11 == 1.0
    }

    pub fn right_dirichlet(&self) -> bool {
        self.gamma.g21 == 1.0
    }

    /// Every violated structural invariant, 1-based indices.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let m = self.m();
        if m < 1 {
            out.push(Violation::Dimension("no diffusion coefficients".into()));
            return out;
        }
        if self.reaction.shape() != (m, m) {
            out.push(Violation::Dimension(format!(
                "reaction matrix is {}x{}, expected {m}x{m}",
                self.reaction.rows(),
                self.reaction.cols()
            )));
            return out;
        }
        if !(self.length.is_finite() && self.length > 0.0) {
            out.push(Violation::NonPositiveLength(self.length));
        }
        for (i, d) in self.diffusion.iter().enumerate() {
            if !d.is_finite() {
                out.push(Violation::NonFinite(format!("diffusion d_{}", i + 1)));
            } else if *d <= 0.0 {
                out.push(Violation::NonPositiveDiffusion {
                    index: i + 1,
                    value: *d,
                });
            }
        }
        if !self.reaction.is_finite() {
            out.push(Violation::NonFinite("reaction matrix".into()));
        }
        for i in 0..m {
            for j in 0..m {
                if i >= j + 2 && self.reaction[(i, j)] != 0.0 {
                    out.push(Violation::CascadeStructure {
                        row: i + 1,
                        col: j + 1,
                    });
                }
            }
        }
        for i in 1..m {
            if self.reaction[(i, i - 1)] == 0.0 {
                out.push(Violation::ZeroSubdiagonal { row: i + 1, col: i });
            }
        }
        let g = self.gamma;
        let flag = |v: f64| v == 0.0 || v == 1.0;
        if !(flag(g.g11) && flag(g.g21)) {
            out.push(Violation::BoundaryCoefficients(format!(
                "gamma11 = {} and gamma21 = {} must each be 0 or 1",
                g.g11, g.g21
            )));
        }
        if g.g12 != 1.0 - g.g11 || g.g22 != 1.0 - g.g21 {
            out.push(Violation::BoundaryCoefficients(
                "require gamma12 = 1 - gamma11 and gamma22 = 1 - gamma21".into(),
            ));
        }
        match self.actuation {
            Actuation::Internal => {
                for (k, s) in self.shapes.iter().enumerate() {
                    if let Some(reason) = self.shape_problem(s) {
                        out.push(Violation::Shape {
                            index: k + 1,
                            reason,
                        });
                    }
                }
            }
            Actuation::Boundary => {
                if !self.shapes.is_empty() {
                    out.push(Violation::Shape {
                        index: 1,
                        reason: "boundary actuation takes no shape functions".into(),
                    });
                }
            }
        }
        if !(self.sigma_tolerance >= 0.0 && self.sigma_tolerance.is_finite()) {
            out.push(Violation::NonFinite("sigma tolerance".into()));
        }
        out
    }

    fn shape_problem(&self, s: &ShapeFn) -> Option<String> {
        match s {
            ShapeFn::Indicator { a, b } => {
                if !(a.is_finite() && b.is_finite()) {
                    Some("non-finite interval".into())
                } else if *a < 0.0 || *b > self.length || a > b {
                    Some(format!(
                        "interval [{a}, {b}] not inside [0, {}]",
                        self.length
                    ))
                } else {
                    None
                }
            }
            ShapeFn::Sampled { values } => {
                if values.len() < Tolerances::MIN_SAMPLED_POINTS {
                    Some(format!(
                        "sampled grid has {} points, need at least {}",
                        values.len(),
                        Tolerances::MIN_SAMPLED_POINTS
                    ))
                } else if values.iter().any(|v| !v.is_finite()) {
                    Some("non-finite sample".into())
                } else {
                    None
                }
            }
        }
    }

    /// Error unless `validate` is empty.
    pub fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidPlant(v))
        }
    }

    fn same_diffusion(&self, a: f64, b: f64) -> bool {
        a == b || (a - b).abs() <= self.sigma_tolerance * a.abs().max(b.abs())
    }

    pub fn sigma_index(&self) -> SigmaIndex {
        let m = self.m();
        let last = self.d_last();
        let mut sigma = m;
        while sigma > 1 && self.same_diffusion(self.diffusion[sigma - 2], last) {
            sigma -= 1;
        }
        let sigma_bar = (2 * sigma as isize - 3).min(2 * m as isize - 4).max(0) as usize;
        SigmaIndex { sigma, sigma_bar }
    }

    /// Sym(Q) − D·diag{k_Q, λ₁, …, λ₁} + δ₀I.
    pub fn stabilizability_matrix(&self, k_q: f64, delta0: f64, lambda1: f64) -> Matrix {
        let m = self.m();
        let mut s = self.reaction.sym();
        for i in 0..m {
            let w = if i == 0 { k_q } else { lambda1 };
            s[(i, i)] += delta0 - self.diffusion[i] * w;
        }
        s
    }

    /// Largest eigenvalue of the stabilizability matrix.
    pub fn stabilizability_margin(&self, k_q: f64, delta0: f64, lambda1: f64) -> Result<f64> {
        Ok(symmetric_eigen(&self.stabilizability_matrix(k_q, delta0, lambda1))?.max())
    }

    /// Largest eigenvalue of the trailing (m−1)×(m−1) block at k_Q-independent entries.
    fn trailing_margin(&self, delta0: f64, lambda1: f64) -> Result<f64> {
        let m = self.m();
        if m < 2 {
            return Ok(f64::NEG_INFINITY);
        }
        let s = self.stabilizability_matrix(0.0, delta0, lambda1);
        let t = s.block(1, 1, m - 1, m - 1);
        Ok(symmetric_eigen(&t)?.max())
    }

    /// Smallest k_Q (plus 5%) for which the stabilizability matrix is ⪯ −1e-9·I.
    pub fn check_boundary_stabilizability(&self, delta0: f64, lambda1: f64) -> Result<f64> {
        if self.actuation != Actuation::Boundary {
            return Err(Error::WrongActuation {
                expected: "boundary",
            });
        }
        self.ensure_valid()?;
        let tol = Tolerances::DEFINITENESS;
        let trailing = self.trailing_margin(delta0, lambda1)?;
        if trailing >= -tol {
            return Err(Error::Infeasible {
                reason: "trailing block is not negative definite".into(),
                eigenvalue: trailing,
            });
        }
        let feasible = |k: f64| -> Result<bool> {
            Ok(self.stabilizability_margin(k, delta0, lambda1)? <= -tol)
        };
        if feasible(0.0)? {
            return Ok(0.0);
        }
        let mut hi = 1.0;
        while !feasible(hi)? {
            hi *= 2.0;
            if hi > 1e15 {
                return Err(Error::Infeasible {
                    reason: "no finite k_Q found".into(),
                    eigenvalue: self.stabilizability_margin(hi, delta0, lambda1)?,
                });
            }
        }
        let mut lo = 0.0;
        while hi - lo > Tolerances::BISECTION * hi {
            let mid = 0.5 * (lo + hi);
            if feasible(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(1.05 * hi)
    }

    /// Supremum of δ₀ for which some k_Q satisfies the stabilizability test.
    pub fn supremum_delta0(&self, lambda1: f64) -> Result<f64> {
        Ok(-self.trailing_margin(0.0, lambda1)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q51() -> Matrix {
        Matrix::from_row_slice(3, 3, &[10.0, 4.0, 8.0, 1.0, 10.0, 2.0, 0.0, 1.0, 20.0])
    }

    fn plant(d: &[f64], q: Matrix, actuation: Actuation) -> PlantSpec {
        PlantSpec {
            length: std::f64::consts::PI,
            diffusion: d.to_vec(),
            reaction: q,
            actuation,
            gamma: Gamma::NEUMANN_DIRICHLET,
            shapes: vec![],
            sigma_tolerance: 0.0,
        }
    }

    #[test]
    fn validation_messages() {
        let p = plant(&[4.0, 3.0, 6.0], q51(), Actuation::Internal);
        assert!(p.validate().is_empty());
        let mut q = q51();
        q[(1, 0)] = 0.0;
        let v = plant(&[4.0, 3.0, 6.0], q, Actuation::Internal).validate();
        assert_eq!(v, vec![Violation::ZeroSubdiagonal { row: 2, col: 1 }]);
        assert_eq!(
            v[0].to_string(),
            "controllability: zero subdiagonal at (2,1)"
        );
        let mut q = q51();
        q[(2, 0)] = 5.0;
        let v = plant(&[4.0, 3.0, 6.0], q, Actuation::Internal).validate();
        assert_eq!(v, vec![Violation::CascadeStructure { row: 3, col: 1 }]);
    }

    #[test]
    fn robin_rejected() {
        let mut p = plant(
            &[1.0, 2.0],
            Matrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 0.0]),
            Actuation::Internal,
        );
        p.gamma = Gamma::new(0.5, 0.5, 1.0, 0.0);
        assert!(matches!(
            p.validate()[0],
            Violation::BoundaryCoefficients(_)
        ));
    }

    #[test]
    fn sigma_examples() {
        let s = |d: &[f64]| {
            plant(d, Matrix::zeros(d.len(), d.len()), Actuation::Internal).sigma_index()
        };
        assert_eq!(
            s(&[4.0, 3.0, 6.0]),
            SigmaIndex {
                sigma: 3,
                sigma_bar: 2
            }
        );
        assert_eq!(
            s(&[2.0, 2.0, 2.0]),
            SigmaIndex {
                sigma: 1,
                sigma_bar: 0
            }
        );
        assert_eq!(
            s(&[1.0, 2.0, 2.0, 2.0]),
            SigmaIndex {
                sigma: 2,
                sigma_bar: 1
            }
        );
        assert_eq!(
            s(&[1.0, 2.0]),
            SigmaIndex {
                sigma: 2,
                sigma_bar: 0
            }
        );
    }

    #[test]
    fn sigma_tolerance_flag() {
        let mut p = plant(
            &[4.0, 3.0, 3.0 + 1e-12],
            Matrix::zeros(3, 3),
            Actuation::Internal,
        );
        assert_eq!(p.sigma_index().sigma, 3);
        p.sigma_tolerance = 1e-9;
        assert_eq!(p.sigma_index().sigma, 2);
    }

    #[test]
    fn stabilizability_examples() {
        let q52 =
            Matrix::from_row_slice(3, 3, &[10.0, 1.0, 8.0, 1.0, -10.0, 2.0, 0.0, -10.0, -20.0]);
        let p = plant(&[4.0, 5.0, 6.0], q52, Actuation::Boundary);
        let s = p.stabilizability_matrix(10.0, 9.0, 0.25);
        let expected =
            Matrix::from_row_slice(3, 3, &[-21.0, 1.0, 4.0, 1.0, -2.25, -4.0, 4.0, -4.0, -12.5]);
        assert!(s.max_abs_diff(&expected) < 1e-14);
        let k = p.check_boundary_stabilizability(9.0, 0.25).unwrap();
        assert!(k > 0.0 && k <= 10.0);
        assert!(p.stabilizability_margin(k, 9.0, 0.25).unwrap() <= 1e-9);

        let p51 = plant(&[4.0, 3.0, 6.0], q51(), Actuation::Boundary);
        assert!(matches!(
            p51.check_boundary_stabilizability(9.0, 0.25),
            Err(Error::Infeasible { .. })
        ));

        let stable = plant(
            &[1.0, 2.0, 3.0],
            Matrix::from_row_slice(3, 3, &[-10.0, 0.0, 0.0, 1.0, -10.0, 0.0, 0.0, 1.0, -10.0]),
            Actuation::Boundary,
        );
        assert_eq!(
            stable.check_boundary_stabilizability(1.0, 0.25).unwrap(),
            0.0
        );
    }

    #[test]
    fn spec_round_trip() {
        let p = plant(&[4.0, 3.0, 6.0], q51(), Actuation::Internal);
        let s = serde_json::to_string(&p).unwrap();
        let back: PlantSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(p, back);
        let bad = s.replace("\"length\"", "\"lenght\"");
        assert!(serde_json::from_str::<PlantSpec>(&bad).is_err());
    }
}
