//! synthesize, simulate and verify.

use std::fmt::Write;
use std::path::{Path, PathBuf};

use cascade_core::boundary::{self, BoundaryController};
use cascade_core::internal::{self, certify_internal, InternalController};
use cascade_core::linalg::{condition_one, inverse};
use cascade_core::quadrature::simpson;
use cascade_core::sim::{self, ClosedLoopSystem, Integrator, SimOptions, Trajectory};
use cascade_core::{Certificate, Check, Error, PlantSpec, SpectralBasis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{Design, RunConfig};
use crate::output;
use crate::CliError;

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub n_sim: Option<usize>,
    pub integrator: Option<Integrator>,
}

pub const DEFAULT_SEED: u64 = 20_240_917;

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "actuation", content = "controller", rename_all = "lowercase")]
pub enum Controller {
    Internal(InternalController),
    Boundary(BoundaryController),
}

impl Controller {
    pub fn n_modes(&self) -> usize {
        match self {
            Controller::Internal(c) => c.n_modes,
            Controller::Boundary(c) => c.n_modes,
        }
    }

    pub fn minimal_n(&self) -> usize {
        match self {
            Controller::Internal(c) => c.minimal_n,
            Controller::Boundary(c) => c.minimal_n,
        }
    }
}

pub struct Synthesis {
    pub plant: PlantSpec,
    pub basis: SpectralBasis,
    pub controller: Controller,
    pub certificate: Certificate,
    pub n_sim: usize,
}

impl Synthesis {
    pub fn assemble(&self) -> Result<ClosedLoopSystem, CliError> {
        Ok(match &self.controller {
            Controller::Internal(c) => {
                sim::assemble_internal(&self.plant, c, &self.basis, self.n_sim)?
            }
            Controller::Boundary(c) => {
                sim::assemble_boundary(&self.plant, c, &self.basis, self.n_sim)?
            }
        })
    }
}

pub fn synthesize_config(cfg: &RunConfig, ov: &Overrides) -> Result<Synthesis, CliError> {
    let plant = cfg.plant.clone();
    let basis = SpectralBasis::from_plant(&plant)?;
    let controller = match &cfg.design {
        Design::Internal(d) => Controller::Internal(internal::synthesize(&plant, d)?),
        Design::Boundary(d) => Controller::Boundary(boundary::synthesize(&plant, d)?),
    };
    let n_sim = ov
        .n_sim
        .or(cfg.simulation.n_sim)
        .unwrap_or_else(|| sim::default_n_sim(controller.n_modes()));
    let certificate = match &controller {
        Controller::Internal(c) => certify_internal(&plant, c, &basis, n_sim)?,
        Controller::Boundary(c) => boundary::certify_boundary(&plant, c, &basis, n_sim)?,
    };
    Ok(Synthesis {
        plant,
        basis,
        controller,
        certificate,
        n_sim,
    })
}

pub fn out_dir(cfg: &RunConfig, ov: &Overrides) -> PathBuf {
    ov.out
        .clone()
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn summary(s: &Synthesis) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "N = {} (minimal {}), N_sim = {}",
        s.controller.n_modes(),
        s.controller.minimal_n(),
        s.n_sim
    );
    match &s.controller {
        Controller::Internal(c) => {
            let _ = writeln!(out, "K_Q = {:?}", c.k_q.as_slice());
            let _ = writeln!(out, "placed poles = {:?}", c.poles);
            let _ = writeln!(
                out,
                "sigma = {}, sigma_bar = {}",
                c.family.sigma, c.family.sigma_bar
            );
        }
        Controller::Boundary(c) => {
            let _ = writeln!(out, "k_Q = {}, mu0 = {}", c.k_q, c.mu0);
            let _ = writeln!(out, "mu = {:?}", c.mus);
            let _ = writeln!(out, "psi inverse: {:?}", c.inverse_method);
        }
    }
    out
}

#[derive(Serialize)]
struct Export<'a> {
    n_sim: usize,
    #[serde(flatten)]
    controller: &'a Controller,
    certificate: &'a Certificate,
}

pub fn synthesize(cfg: &RunConfig, ov: &Overrides) -> Result<bool, CliError> {
    let s = synthesize_config(cfg, ov)?;
    print!("{}", summary(&s));
    println!("{}", s.certificate);
    let dir = out_dir(cfg, ov);
    output::ensure_dir(&dir)?;
    let path = dir.join("controller.json");
    output::write_json(
        &path,
        &Export {
            n_sim: s.n_sim,
            controller: &s.controller,
            certificate: &s.certificate,
        },
    )?;
    println!("wrote {}", path.display());
    Ok(s.certificate.passed)
}

pub fn run_simulation(
    cfg: &RunConfig,
    ov: &Overrides,
    s: &Synthesis,
) -> Result<(ClosedLoopSystem, Trajectory), CliError> {
    let z0 = cfg
        .initial
        .as_ref()
        .ok_or_else(|| CliError::Config("simulation needs an \"initial\" condition".into()))?;
    let sys = s.assemble()?;
    let x0 = sys.initial_state(z0)?;
    let opts = SimOptions {
        t_final: cfg.simulation.t_final,
        dt: cfg.simulation.dt,
        integrator: ov.integrator.unwrap_or(cfg.simulation.integrator),
    };
    let traj = sim::integrate(&sys, &x0, opts).map_err(|e| match e {
        Error::StepTooLarge { dt, bound } => CliError::Rejected(format!(
            "dt = {dt:e} exceeds the RK4 stability bound {bound:e} for this system; \
             use dt <= {bound:e} or --integrator expm"
        )),
        other => other.into(),
    })?;
    Ok((sys, traj))
}

pub fn simulate(cfg: &RunConfig, ov: &Overrides) -> Result<bool, CliError> {
    let s = synthesize_config(cfg, ov)?;
    print!("{}", summary(&s));
    println!("{}", s.certificate);
    let (sys, traj) = run_simulation(cfg, ov, &s)?;
    let window = cfg.simulation.window.map_or_else(
        || sim::default_window(cfg.simulation.t_final),
        |[a, b]| (a, b),
    );
    match sim::decay_rate(&traj, window) {
        Ok(fit) => println!(
            "decay rate over [{}, {}]: {:.4} (target {}), envelope {:.3}",
            window.0,
            window.1,
            fit.rate,
            cfg.design.rate(),
            fit.envelope
        ),
        Err(e) => println!("decay rate unavailable: {e}"),
    }
    if let Some(last) = traj.norms.last() {
        println!(
            "final norms at t = {}: {:?}",
            traj.times[traj.len() - 1],
            last
        );
    }
    let dir = out_dir(cfg, ov);
    for p in output::write_run(&dir, &sys, &traj, cfg.simulation.x_points)? {
        println!("wrote {}", p.display());
    }
    Ok(s.certificate.passed)
}

fn seeded_lambdas(
    rng: &mut ChaCha8Rng,
    basis: &SpectralBasis,
    n_sim: usize,
    count: usize,
) -> Result<Vec<f64>, CliError> {
    let top = basis.eigenvalue(n_sim)?;
    Ok((0..count).map(|_| rng.random_range(0.0..=top)).collect())
}

fn internal_checks(
    s: &Synthesis,
    c: &InternalController,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<(&'static str, Check)>, CliError> {
    let mut checks = Vec::new();
    for (i, (res, bound)) in c
        .family
        .sylvester_residuals(&s.plant)
        .into_iter()
        .enumerate()
    {
        checks.push((
            "transform",
            Check::at_most(
                format!("sylvester residual T{}", i + 1),
                res,
                bound,
                "per coefficient",
            ),
        ));
    }
    checks.push((
        "transform",
        Check::at_most(
            "sparsity pattern",
            f64::from(u8::from(!c.family.respects_pattern())),
            0.0,
            "entries outside the admissible pattern",
        ),
    ));
    let lambdas = seeded_lambdas(rng, &s.basis, s.n_sim, 20)?;
    let qn = s.plant.reaction.norm_fro().max(f64::MIN_POSITIVE);
    let worst = lambdas
        .iter()
        .map(|&l| {
            c.family.full_residual(&s.plant, l)
                / (1e-8 * (1.0 + l.powi(c.family.sigma_bar as i32 + 1)) * qn)
        })
        .fold(0.0, f64::max);
    checks.push((
        "transform",
        Check::at_most(
            "full residual",
            worst,
            1.0,
            "max residual / bound over 20 seeded lambda",
        ),
    ));
    checks.push((
        "actuators",
        Check::at_most(
            "shape matrix conditioning",
            c.shape.condition,
            1e12,
            "1-norm condition number",
        )
        .informational(),
    ));
    Ok(checks)
}

fn boundary_checks(
    s: &Synthesis,
    c: &BoundaryController,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<(&'static str, Check)>, CliError> {
    let mut checks = Vec::new();
    let lu = inverse(&c.psi)?;
    let rel = c.psi_inv.max_abs_diff(&lu) / lu.max_abs();
    checks.push((
        "lifting",
        Check::at_most(
            "psi inverse vs LU",
            rel,
            1e-7,
            format!("{:?}, relative", c.inverse_method),
        ),
    ));
    let worst_bvp = c
        .psis
        .iter()
        .map(|p| {
            let r = p.residuals();
            r.ode.max(r.left).max(r.right)
        })
        .fold(0.0, f64::max);
    checks.push((
        "lifting",
        Check::at_most(
            "lifting boundary-value residual",
            worst_bvp,
            1e-10,
            "ODE and both ends",
        ),
    ));
    let length = s.basis.length;
    let mut worst_proj: f64 = 0.0;
    for _ in 0..10 {
        let j = rng.random_range(0..c.psis.len());
        let n = rng.random_range(1..=s.n_sim);
        let p = &c.psis[j];
        let closed = p.project(n)?;
        let phi = s.basis.wave(n)?;
        let quad = simpson(|x| p.eval(x) * phi.eval(x), 0.0, length, 20_001);
        worst_proj = worst_proj.max((closed - quad).abs() / p.wave.amp.abs().max(1.0));
    }
    checks.push((
        "lifting",
        Check::at_most(
            "psi projections vs quadrature",
            worst_proj,
            1e-8,
            "10 seeded (j, n) pairs",
        ),
    ));
    checks.push((
        "lifting",
        Check::at_most(
            "psi conditioning",
            condition_one(&c.psi)?,
            1e12,
            "1-norm condition number",
        )
        .informational(),
    ));
    Ok(checks)
}

/// Property report; returns the text and the verdict.
pub fn verify_report(cfg: &RunConfig, ov: &Overrides) -> Result<(String, bool), CliError> {
    let seed = ov.seed.unwrap_or(DEFAULT_SEED);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = synthesize_config(cfg, ov)?;
    let mut text = String::new();
    let _ = writeln!(text, "seed = {seed}");
    text.push_str(&summary(&s));
    let sig = s.plant.sigma_index();
    let _ = writeln!(
        text,
        "plant: m = {}, sigma = {}, sigma_bar = {}",
        s.plant.m(),
        sig.sigma,
        sig.sigma_bar
    );
    let extra = match &s.controller {
        Controller::Internal(c) => internal_checks(&s, c, &mut rng)?,
        Controller::Boundary(c) => boundary_checks(&s, c, &mut rng)?,
    };
    let mut section = "";
    for (name, check) in &extra {
        if *name != section {
            let _ = writeln!(text, "== {name} ==");
            section = name;
        }
        let _ = writeln!(text, "{check}");
    }
    let _ = writeln!(text, "== certificate ==");
    for c in &s.certificate.checks {
        let _ = writeln!(text, "{c}");
    }
    let passed = s.certificate.passed && extra.iter().all(|(_, c)| c.passed || c.informational);
    let _ = writeln!(
        text,
        "verdict: {}",
        if passed { "CERTIFIED" } else { "REJECTED" }
    );
    Ok((text, passed))
}

pub fn verify(cfg: &RunConfig, ov: &Overrides) -> Result<bool, CliError> {
    let (text, passed) = verify_report(cfg, ov)?;
    print!("{text}");
    let dir = out_dir(cfg, ov);
    output::ensure_dir(&dir)?;
    let path: &Path = &dir.join("verify.txt");
    output::write_report(path, &text)?;
    println!("wrote {}", path.display());
    Ok(passed)
}
