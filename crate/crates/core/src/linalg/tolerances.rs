//! Numerical thresholds shared by the kernel and its callers.

/// Fixed tolerances. Every threshold used by the crate lives here.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances;

impl Tolerances {
    /// Relative asymmetry accepted by symmetric routines.
    pub const SYMMETRY: f64 = 1e-12;
    /// LU pivot threshold relative to the max-abs entry.
    pub const SINGULAR_PIVOT: f64 = 1e-15;
    /// QR sweeps allowed per eigenvalue before giving up.
    pub const QR_ITERATIONS_PER_EIGENVALUE: usize = 60;
    /// Jacobi sweeps for symmetric eigenproblems.
    pub const JACOBI_SWEEPS: usize = 100;
    /// Lyapunov residual bound.
    pub const LYAPUNOV_RESIDUAL: f64 = 1e-8;
    /// Pole placement accuracy.
    pub const PLACEMENT: f64 = 1e-6;
    /// Definiteness margin used when "≺ 0" must hold with headroom.
    pub const DEFINITENESS: f64 = 1e-9;
    /// Relative determinant threshold for the shape matrix.
    pub const SHAPE_DETERMINANT: f64 = 1e-10;
    /// Minimum separation between μ_j and any λ_n.
    pub const MU_SEPARATION: f64 = 1e-6;
    /// Closed-loop abscissa slack: max Re ≤ −δ(1 − this).
    pub const ABSCISSA_SLACK: f64 = 1e-6;
    /// Spectrum-similarity agreement.
    pub const SIMILARITY: f64 = 1e-6;
    /// Default quadrature node count (odd, for Simpson).
    pub const QUADRATURE_NODES: usize = 4001;
    /// Minimum sampled-grid length.
    pub const MIN_SAMPLED_POINTS: usize = 101;
    /// Relative bisection tolerance.
    pub const BISECTION: f64 = 1e-6;
    /// Hard cap on the controlled mode count.
    pub const MODE_CAP: usize = 512;
    /// Largest μ0 tried by the integer sweep.
    pub const MU0_CAP: u32 = 64;
}
