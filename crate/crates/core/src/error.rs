use thiserror::Error;

use crate::linalg::LinalgError;
use crate::model::Violation;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("invalid plant: {}", join(.0))]
    InvalidPlant(Vec<Violation>),
    #[error("operation requires {expected} actuation")]
    WrongActuation { expected: &'static str },
    #[error("mode index must be at least 1, got {0}")]
    ModeIndex(usize),
    #[error("no mode count up to {cap} satisfies the dissipativity condition")]
    ModeCap { cap: usize },
    #[error("mode count override {requested} is below the minimal admissible {minimal}")]
    ModeOverride { requested: usize, minimal: usize },
    #[error("stabilizability condition infeasible: {reason} (largest eigenvalue {eigenvalue:e})")]
    Infeasible { reason: String, eigenvalue: f64 },
    #[error("shape matrix is singular (normalized determinant {normalized_det:e})")]
    ShapeSingular { normalized_det: f64 },
    #[error("need at least {needed} shape functions, got {got}")]
    NotEnoughShapes { needed: usize, got: usize },
    #[error("mu_{j} = {mu} collides with lambda_{n} = {lambda}")]
    MuCollision {
        j: usize,
        mu: f64,
        n: usize,
        lambda: f64,
    },
    #[error("mu0 must be a positive integer")]
    Mu0Domain,
    #[error(
        "no mu0 in 1..={cap} satisfies the lifting conditions (best ineq margin {best_margin:e})"
    )]
    Mu0Exhausted {
        cap: u32,
        best_margin: f64,
        trace: Vec<Mu0Trial>,
    },
    #[error("transformation residual {residual:e} exceeds bound {bound:e} at lambda = {lambda}")]
    ResidualExceeded {
        lambda: f64,
        residual: f64,
        bound: f64,
    },
    #[error("certification failed: {0}")]
    Certification(String),
    #[error("time step {dt:e} exceeds the RK4 stability bound {bound:e}")]
    StepTooLarge { dt: f64, bound: f64 },
    #[error("simulation needs N_sim >= {needed}, got {got}")]
    SimModes { needed: usize, got: usize },
    #[error("decay window holds {got} samples, need at least 20")]
    WindowTooShort { got: usize },
    #[error("invalid argument: {0}")]
    Argument(String),
}

/// One step of the μ0 sweep.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Mu0Trial {
    pub mu0: u32,
    /// min eig Sym(ΨMΨ⁻¹) − k_Q.
    pub lift_margin: f64,
    /// max eig Sym(H̄) + δ0.
    pub h_margin: f64,
}

fn join(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
