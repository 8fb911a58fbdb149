//! Spectral-truncation closed loop: assembly, propagation, reconstruction
//! and decay-rate fitting.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::boundary::BoundaryController;
use crate::error::{Error, Result};
use crate::internal::InternalController;
use crate::linalg::{eigenvalues, matrix_exponential, Matrix};
use crate::model::{Actuation, PlantSpec};
use crate::spectral::{InitialCondition, PsiFunction, SpectralBasis};

pub fn default_n_sim(n_modes: usize) -> usize {
    (4 * n_modes).max(60)
}

/// Flat index map: modal block first, controller state X after it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Layout {
    pub m: usize,
    pub n_sim: usize,
    pub n_ctrl: usize,
    pub has_x: bool,
}

impl Layout {
    /// Index of component i (0-based) of mode n (1-based).
    pub fn modal(&self, n: usize, i: usize) -> usize {
        (n - 1) * self.m + i
    }

    /// Index of entry j of block b of X (both 0-based).
    pub fn x(&self, block: usize, j: usize) -> usize {
        self.m * self.n_sim + block * self.n_ctrl + j
    }

    pub fn dim(&self) -> usize {
        self.m * self.n_sim + if self.has_x { self.m * self.n_ctrl } else { 0 }
    }
}

#[derive(Debug, Clone)]
pub enum Readout {
    /// Physical state is the modal block itself.
    Internal,
    /// z₁ = w₁ + Σ_j ψ_j u_j with u the first N entries of X.
    Boundary {
        /// n_sim × N, entry (n, j) = ψ_{j,n}.
        psi_modes: Matrix,
        psis: Vec<PsiFunction>,
        edge: EdgeProfile,
    },
}

/// Slowly varying profile ξ carrying the right-boundary data of z₁.
///
/// z₁ − (Σu)ξ meets homogeneous conditions, so its modal tail is negligible
/// and the truncated series of z₁ is completed by (Σu)(ξ − Σ_{n≤N_sim} ξ_n φ_n).
#[derive(Debug, Clone)]
pub struct EdgeProfile {
    pub xi: PsiFunction,
    /// ξ_n for n = 1..N_sim.
    pub modes: Vec<f64>,
    /// ‖ξ‖² − Σ_{n≤N_sim} ξ_n².
    pub tail: f64,
}

impl EdgeProfile {
    fn new(basis: &SpectralBasis, n_sim: usize) -> Result<Self> {
        let first = basis.eigenvalue(1)?;
        let lowest = if first > 0.0 {
            first
        } else {
            basis.eigenvalue(2)?
        };
        let xi = basis.psi(0.25 * lowest)?;
        let modes: Vec<f64> = (1..=n_sim).map(|n| xi.project(n)).collect::<Result<_>>()?;
        let tail = xi.wave.inner(&xi.wave, basis.length) - modes.iter().map(|c| c * c).sum::<f64>();
        Ok(EdgeProfile {
            xi,
            modes,
            tail: tail.max(0.0),
        })
    }
}

#[derive(Debug, Clone)]
pub struct ClosedLoopSystem {
    pub actuation: Actuation,
    pub acl: Matrix,
    pub layout: Layout,
    pub basis: SpectralBasis,
    /// N × dim map from state to the control vector u.
    pub control_map: Matrix,
    pub readout: Readout,
}

fn check_modes(n_modes: usize, n_sim: usize) -> Result<()> {
    if n_sim < n_modes {
        return Err(Error::SimModes {
            needed: n_modes,
            got: n_sim,
        });
    }
    Ok(())
}

/// Modal closed loop with the spillover of u into every retained mode.
pub fn assemble_internal(
    spec: &PlantSpec,
    ctrl: &InternalController,
    basis: &SpectralBasis,
    n_sim: usize,
) -> Result<ClosedLoopSystem> {
    let n = ctrl.n_modes;
    check_modes(n, n_sim)?;
    let m = spec.m();
    let layout = Layout {
        m,
        n_sim,
        n_ctrl: n,
        has_x: false,
    };
    let dim = layout.dim();
    let mut acl = Matrix::zeros(dim, dim);
    for k in 1..=n_sim {
        let lambda = basis.eigenvalue(k)?;
        let r0 = layout.modal(k, 0);
        acl.set_block(
            r0,
            r0,
            &(&spec.reaction - &spec.diffusion_matrix().scale(lambda)),
        );
        let b_row: Vec<f64> = spec.shapes[..n]
            .iter()
            .map(|s| basis.project_shape(s, k))
            .collect::<Result<_>>()?;
        acl.add_block(r0, 0, &(&Matrix::row(&b_row) * &ctrl.gain));
    }
    let mut control_map = Matrix::zeros(n, dim);
    control_map.set_block(0, 0, &ctrl.gain);
    Ok(ClosedLoopSystem {
        actuation: Actuation::Internal,
        acl,
        layout,
        basis: *basis,
        control_map,
        readout: Readout::Internal,
    })
}

/// (w_1..w_{N_sim}, X) closed loop, with u̇ resolved through the X-law.
pub fn assemble_boundary(
    spec: &PlantSpec,
    ctrl: &BoundaryController,
    basis: &SpectralBasis,
    n_sim: usize,
) -> Result<ClosedLoopSystem> {
    let n = ctrl.n_modes;
    check_modes(n, n_sim)?;
    let m = spec.m();
    let mn = m * n;
    let layout = Layout {
        m,
        n_sim,
        n_ctrl: n,
        has_x: true,
    };
    let dim = layout.dim();
    let xo = m * n_sim;
    let b = spec.input();
    let mut psi_modes = Matrix::zeros(n_sim, n);
    for k in 0..n_sim {
        for (j, p) in ctrl.psis.iter().enumerate() {
            psi_modes[(k, j)] = p.project(k + 1)?;
        }
    }
    let mut su = Matrix::zeros(n, mn);
    su.set_block(0, 0, &Matrix::identity(n));
    // Z_N = W_N + E·X
    let e_rows: Vec<Matrix> = (0..n)
        .map(|k| &(&b * &psi_modes.block(k, 0, 1, n)) * &su)
        .collect();
    let e = Matrix::vstack(&e_rows);
    let xx = &ctrl.x_law + &(&ctrl.z_law * &e);
    let mut acl = Matrix::zeros(dim, dim);
    acl.set_block(xo, 0, &ctrl.z_law);
    acl.set_block(xo, xo, &xx);
    let udot_w = &su * &ctrl.z_law;
    let udot_x = &su * &xx;
    let mu = Matrix::diag(&ctrl.mus);
    for k in 1..=n_sim {
        let r0 = layout.modal(k, 0);
        let lambda = basis.eigenvalue(k)?;
        acl.set_block(
            r0,
            r0,
            &(&spec.reaction - &spec.diffusion_matrix().scale(lambda)),
        );
        let bp = &b * &psi_modes.block(k - 1, 0, 1, n);
        let lift = &(&(&spec.reaction * &bp) - &(&bp * &mu).scale(spec.d(0))) * &su;
        acl.add_block(r0, xo, &(&lift - &(&bp * &udot_x)));
        acl.add_block(r0, 0, &-(&bp * &udot_w));
    }
    if !acl.is_finite() {
        return Err(Error::Argument("closed-loop matrix is not finite".into()));
    }
    let mut control_map = Matrix::zeros(n, dim);
    control_map.set_block(0, xo, &Matrix::identity(n));
    Ok(ClosedLoopSystem {
        actuation: Actuation::Boundary,
        acl,
        layout,
        basis: *basis,
        control_map,
        readout: Readout::Boundary {
            psi_modes,
            psis: ctrl.psis.clone(),
            edge: EdgeProfile::new(basis, n_sim)?,
        },
    })
}

impl ClosedLoopSystem {
    pub fn dim(&self) -> usize {
        self.acl.rows()
    }

    pub fn spectral_abscissa(&self) -> Result<f64> {
        Ok(eigenvalues(&self.acl)?.max_real())
    }

    /// Modal projection of z⁰; X(0) = 0 so w(0) = z(0).
    pub fn initial_state(&self, z0: &InitialCondition) -> Result<Vec<f64>> {
        if z0.components() != self.layout.m {
            return Err(Error::Argument(format!(
                "initial condition has {} components, plant has {}",
                z0.components(),
                self.layout.m
            )));
        }
        let mut x = vec![0.0; self.dim()];
        for k in 1..=self.layout.n_sim {
            let v = self.basis.project_initial(z0, k)?;
            for (i, c) in v.values.into_iter().enumerate() {
                x[self.layout.modal(k, i)] = c;
            }
        }
        Ok(x)
    }

    pub fn controls(&self, x: &[f64]) -> Vec<f64> {
        self.control_map.mul_vec(x)
    }

    /// Modal coefficients z_n of the physical state, n = 1..N_sim. Under
    /// boundary actuation z_n = w_n + B·Ψ_nᵀu.
    pub fn physical_modes(&self, x: &[f64]) -> Vec<f64> {
        let l = self.layout;
        let mut z = x[..l.m * l.n_sim].to_vec();
        if let Readout::Boundary { psi_modes, .. } = &self.readout {
            let u = self.controls(x);
            for k in 0..l.n_sim {
                z[l.modal(k + 1, 0)] +=
                    (0..l.n_ctrl).map(|j| psi_modes[(k, j)] * u[j]).sum::<f64>();
            }
        }
        z
    }

    /// L² norms of z_1..z_m by Parseval over the retained modes, plus the
    /// boundary-profile tail for the actuated component.
    pub fn component_norms(&self, x: &[f64]) -> Vec<f64> {
        let l = self.layout;
        let z = self.physical_modes(x);
        let mut sq = vec![0.0; l.m];
        for k in 1..=l.n_sim {
            for (i, s) in sq.iter_mut().enumerate() {
                *s += z[l.modal(k, i)].powi(2);
            }
        }
        if let Readout::Boundary { edge, .. } = &self.readout {
            let g: f64 = self.controls(x).iter().sum();
            sq[0] += g * g * edge.tail;
        }
        sq.into_iter().map(f64::sqrt).collect()
    }

    /// Component norms followed by the total norm.
    pub fn norms(&self, x: &[f64]) -> Vec<f64> {
        let mut v = self.component_norms(x);
        let total = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        v.push(total);
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Integrator {
    #[default]
    Expm,
    Rk4,
}

impl FromStr for Integrator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "expm" => Ok(Integrator::Expm),
            "rk4" => Ok(Integrator::Rk4),
            other => Err(Error::Argument(format!("unknown integrator {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    pub t_final: f64,
    pub dt: f64,
    pub integrator: Integrator,
}

#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// u_1..u_N then Σu_j.
    pub controls: Vec<Vec<f64>>,
    /// ‖z_1‖..‖z_m‖ then ‖z‖.
    pub norms: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn total_norms(&self) -> Vec<f64> {
        self.norms.iter().map(|r| *r.last().unwrap()).collect()
    }

    /// Index of the sample closest to t.
    pub fn index_at(&self, t: f64) -> usize {
        let mut best = 0;
        for (k, &s) in self.times.iter().enumerate() {
            if (s - t).abs() < (self.times[best] - t).abs() {
                best = k;
            }
        }
        best
    }
}

/// Largest RK4 step inside the stability region along the spectrum.
pub fn rk4_step_bound(acl: &Matrix) -> Result<f64> {
    let rho = eigenvalues(acl)?.spectral_radius();
    Ok(if rho > 0.0 { 2.5 / rho } else { f64::INFINITY })
}

fn rk4_step(a: &Matrix, x: &[f64], h: f64) -> Vec<f64> {
    let axpy = |base: &[f64], k: &[f64], s: f64| -> Vec<f64> {
        base.iter().zip(k).map(|(b, k)| b + s * k).collect()
    };
    let k1 = a.mul_vec(x);
    let k2 = a.mul_vec(&axpy(x, &k1, h / 2.0));
    let k3 = a.mul_vec(&axpy(x, &k2, h / 2.0));
    let k4 = a.mul_vec(&axpy(x, &k3, h));
    (0..x.len())
        .map(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

type Stepper = dyn Fn(&[f64]) -> Vec<f64>;

/// Propagates x0 over [0, t_final] with a fixed step, recording every step.
pub fn integrate(sys: &ClosedLoopSystem, x0: &[f64], opts: SimOptions) -> Result<Trajectory> {
    if !(opts.dt > 0.0 && opts.dt.is_finite()) || !(opts.t_final > 0.0 && opts.t_final.is_finite())
    {
        return Err(Error::Argument(format!(
            "need dt > 0 and t_final > 0, got dt = {}, t_final = {}",
            opts.dt, opts.t_final
        )));
    }
    if x0.len() != sys.dim() {
        return Err(Error::Argument(format!(
            "initial state has length {}, expected {}",
            x0.len(),
            sys.dim()
        )));
    }
    let steps = (opts.t_final / opts.dt).round().max(1.0) as usize;
    let step: Box<Stepper> = match opts.integrator {
        Integrator::Expm => {
            let phi = matrix_exponential(&sys.acl, opts.dt)?;
            Box::new(move |x| phi.mul_vec(x))
        }
        Integrator::Rk4 => {
            let bound = rk4_step_bound(&sys.acl)?;
            if opts.dt > bound {
                return Err(Error::StepTooLarge { dt: opts.dt, bound });
            }
            let a = sys.acl.clone();
            let dt = opts.dt;
            Box::new(move |x| rk4_step(&a, x, dt))
        }
    };
    let mut traj = Trajectory {
        times: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity(steps + 1),
        controls: Vec::with_capacity(steps + 1),
        norms: Vec::with_capacity(steps + 1),
    };
    let mut x = x0.to_vec();
    for k in 0..=steps {
        if k > 0 {
            x = step(&x);
        }
        let mut u = sys.controls(&x);
        u.push(u.iter().sum());
        traj.times.push(k as f64 * opts.dt);
        traj.norms.push(sys.norms(&x));
        traj.controls.push(u);
        traj.states.push(x.clone());
    }
    Ok(traj)
}

/// Physical field samples of one component on a uniform grid, summed from
/// the retained modes.
#[derive(Debug, Clone, Serialize)]
pub struct Field {
    pub component: usize,
    pub x: Vec<f64>,
    pub t: Vec<f64>,
    /// values[time][grid point].
    pub values: Vec<Vec<f64>>,
    /// Boundary actuation: max over time of |realized right-boundary value − Σu_j|.
    pub boundary_residual: Option<f64>,
}

pub fn grid(length: f64, points: usize) -> Vec<f64> {
    let p = points.max(2);
    (0..p).map(|k| length * k as f64 / (p - 1) as f64).collect()
}

/// z_i(t, x) on `points` uniform nodes over [0, L].
pub fn reconstruct(
    sys: &ClosedLoopSystem,
    traj: &Trajectory,
    component: usize,
    points: usize,
) -> Result<Field> {
    let l = sys.layout;
    if component >= l.m {
        return Err(Error::Argument(format!(
            "component {component} out of range"
        )));
    }
    let xs = grid(sys.basis.length, points);
    let phis: Vec<Vec<f64>> = (1..=l.n_sim)
        .map(|k| {
            xs.iter()
                .map(|&x| sys.basis.phi(k, x))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let lifted = match (&sys.readout, component) {
        (Readout::Boundary { psis, edge, .. }, 0) => Some((psis, edge)),
        _ => None,
    };
    let completion: Vec<f64> = match lifted {
        Some((_, edge)) => xs
            .iter()
            .enumerate()
            .map(|(p, &x)| {
                edge.xi.eval(x)
                    - edge
                        .modes
                        .iter()
                        .zip(&phis)
                        .map(|(c, row)| c * row[p])
                        .sum::<f64>()
            })
            .collect(),
        None => Vec::new(),
    };
    let right_op = |k: usize| -> Result<f64> {
        let w = sys.basis.wave(k)?;
        Ok(if sys.basis.kind.right_dirichlet() {
            w.eval(sys.basis.length)
        } else {
            w.deriv(sys.basis.length)
        })
    };
    let right_ops: Vec<f64> = (1..=l.n_sim).map(right_op).collect::<Result<_>>()?;
    let mut values = Vec::with_capacity(traj.len());
    let mut residual: f64 = 0.0;
    for (state, ctl) in traj.states.iter().zip(&traj.controls) {
        let z = sys.physical_modes(state);
        let mut row = vec![0.0; xs.len()];
        for k in 1..=l.n_sim {
            let c = z[l.modal(k, component)];
            for (v, p) in row.iter_mut().zip(&phis[k - 1]) {
                *v += c * p;
            }
        }
        if let Some((psis, _)) = lifted {
            let g: f64 = ctl[..l.n_ctrl].iter().sum();
            for (v, c) in row.iter_mut().zip(&completion) {
                *v += g * c;
            }
            // right-boundary value of w + Σψ_j u_j, with w taken from the modal block
            let mut edge: f64 = (1..=l.n_sim)
                .map(|k| state[l.modal(k, 0)] * right_ops[k - 1])
                .sum();
            let l_end = sys.basis.length;
            for (j, p) in psis.iter().enumerate() {
                edge += ctl[j]
                    * if sys.basis.kind.right_dirichlet() {
                        p.eval(l_end)
                    } else {
                        p.deriv(l_end)
                    };
            }
            residual = residual.max((edge - ctl[l.n_ctrl]).abs());
        }
        values.push(row);
    }
    Ok(Field {
        component,
        x: xs,
        t: traj.times.clone(),
        values,
        boundary_residual: lifted.map(|_| residual),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    pub rate: f64,
    /// max_t ‖z(t)‖e^{rate·t}/‖z(0)‖.
    pub envelope: f64,
    pub samples: usize,
    /// True when underflowed samples were dropped from the window.
    pub truncated: bool,
}

pub fn default_window(t_final: f64) -> (f64, f64) {
    (0.1 * t_final, 0.8 * t_final)
}

/// Least-squares slope of log‖z‖ over the window.
pub fn decay_rate(traj: &Trajectory, window: (f64, f64)) -> Result<DecayFit> {
    let norms = traj.total_norms();
    let mut pts = Vec::new();
    let mut truncated = false;
    for (&t, &v) in traj.times.iter().zip(&norms) {
        if t < window.0 || t > window.1 {
            continue;
        }
        if v > 1e-300 && v.is_finite() {
            pts.push((t, v.ln()));
        } else {
            truncated = true;
        }
    }
    if truncated {
        log::warn!("decay window truncated: norm underflow");
    }
    if pts.len() < 20 {
        return Err(Error::WindowTooShort { got: pts.len() });
    }
    let k = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let rate = -sxy / sxx;
    let z0 = norms[0];
    let envelope = if z0 > 0.0 {
        traj.times
            .iter()
            .zip(&norms)
            .map(|(t, v)| v * (rate * t).exp() / z0)
            .fold(0.0, f64::max)
    } else {
        0.0
    };
    Ok(DecayFit {
        rate,
        envelope,
        samples: pts.len(),
        truncated,
    })
}
