//! Both reference examples end to end, scored against the acceptance table.

use std::path::Path;
use std::time::{Duration, Instant};

use cascade_core::boundary::lift_margin;
use cascade_core::linalg::{determinant, symmetric_eigen, Matrix};
use cascade_core::sim;

use crate::config::RunConfig;
use crate::output;
use crate::run::{run_simulation, synthesize_config, Controller, Overrides};
use crate::CliError;

pub const INTERNAL_CONFIG: &str = include_str!("../examples/internal_reference.json");
pub const BOUNDARY_CONFIG: &str = include_str!("../examples/boundary_reference.json");

pub struct Row {
    pub criterion: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn row(criterion: u32, name: &'static str, passed: bool, detail: impl Into<String>) -> Row {
    Row {
        criterion,
        name,
        passed,
        detail: detail.into(),
    }
}

fn internal_rows(out: Option<&Path>) -> Result<Vec<Row>, CliError> {
    let start = Instant::now();
    let cfg = RunConfig::from_json(INTERNAL_CONFIG)?;
    let ov = Overrides::default();
    let s = synthesize_config(&cfg, &ov)?;
    let Controller::Internal(c) = &s.controller else {
        return Err(CliError::Config(
            "internal example did not yield an internal controller".into(),
        ));
    };
    let mut rows = vec![row(
        1,
        "mode count",
        c.n_modes == 3,
        format!("N = {}", c.n_modes),
    )];
    let t1 = &c.family.tbars[0];
    let kappa = t1[(0, 1)];
    let clean = (0..3)
        .flat_map(|j| (0..3).map(move |k| (j, k)))
        .all(|(j, k)| (j, k) == (0, 1) || t1[(j, k)] == 0.0);
    rows.push(row(
        1,
        "T1 pattern",
        clean && (kappa.abs() - 3.0).abs() <= 1e-10,
        format!("kappa_12 = {kappa}"),
    ));
    let t2_zero = c
        .family
        .tbars
        .get(1)
        .is_some_and(|t| t.as_slice().iter().all(|&v| v == 0.0));
    rows.push(row(
        1,
        "T2 zero",
        t2_zero,
        format!("sigma_bar = {}", c.family.sigma_bar),
    ));
    let (sys, traj) = run_simulation(&cfg, &ov, &s)?;
    let abscissa = sys.spectral_abscissa()?;
    rows.push(row(
        1,
        "closed-loop abscissa",
        s.n_sim == 60 && abscissa <= -9.0 * (1.0 - 1e-6),
        format!("N_sim = {}, max Re = {abscissa:.6}", s.n_sim),
    ));
    let fit = sim::decay_rate(&traj, (0.05, 0.4))?;
    rows.push(row(
        1,
        "decay rate",
        fit.rate >= 9.0 * 0.98,
        format!("rate = {:.4}", fit.rate),
    ));
    if let Some(dir) = out {
        output::write_run(
            &dir.join("internal_reference"),
            &sys,
            &traj,
            cfg.simulation.x_points,
        )?;
    }
    let elapsed = start.elapsed();
    rows.push(row(
        1,
        "runtime",
        elapsed <= Duration::from_secs(10),
        format!("{elapsed:.2?}"),
    ));
    Ok(rows)
}

fn boundary_rows(out: Option<&Path>) -> Result<Vec<Row>, CliError> {
    let start = Instant::now();
    let cfg = RunConfig::from_json(BOUNDARY_CONFIG)?;
    let ov = Overrides::default();
    let plant = &cfg.plant;
    let lambda1 = cascade_core::SpectralBasis::from_plant(plant)?.eigenvalue(1)?;
    let test = plant.stabilizability_matrix(10.0, 9.0, lambda1);
    let minors: Vec<f64> = (1..=3)
        .map(|k| determinant(&test.block(0, 0, k, k)))
        .collect::<Result<_, _>>()?;
    let minors_ok = minors
        .iter()
        .zip([-21.0, 46.25, -238.125])
        .all(|(a, b): (&f64, f64)| (a - b).abs() <= 1e-6 * b.abs());
    let mut rows = vec![row(
        2,
        "stabilizability test",
        minors_ok && symmetric_eigen(&test)?.max() < 0.0,
        format!("leading minors {minors:?}"),
    )];
    let s = synthesize_config(&cfg, &ov)?;
    let Controller::Boundary(c) = &s.controller else {
        return Err(CliError::Config(
            "boundary example did not yield a boundary controller".into(),
        ));
    };
    rows.push(row(
        2,
        "lifting frequencies",
        c.mus == [121.0, 144.0, 169.0],
        format!("mu = {:?}", c.mus),
    ));
    let lift = lift_margin(&c.psi, &c.psi_inv, &c.mus, c.k_q)?;
    rows.push(row(
        2,
        "lifting inequality",
        lift > 0.0,
        format!("min eig Sym(Psi M Psi^-1) - k_Q = {lift:.6e}"),
    ));
    let bt = plant.input().transpose();
    let reference = -(&c.psi_inv * &Matrix::identity(3).kron(&bt)).scale(40.0);
    let dev = c.gain.max_abs_diff(&reference) / reference.max_abs();
    rows.push(row(
        2,
        "gain structure",
        dev <= 1e-14,
        format!("relative deviation {dev:.2e}"),
    ));
    let (sys, traj) = run_simulation(&cfg, &ov, &s)?;
    let abscissa = sys.spectral_abscissa()?;
    rows.push(row(
        2,
        "closed-loop abscissa",
        sys.dim() == 189 && abscissa <= -9.0 * (1.0 - 1e-6),
        format!("dim = {}, max Re = {abscissa:.6}", sys.dim()),
    ));
    let from = traj.index_at(0.05);
    let monotone: Vec<bool> = (0..3)
        .map(|i| traj.norms[from..].windows(2).all(|w| w[1][i] < w[0][i]))
        .collect();
    rows.push(row(
        2,
        "monotone norms",
        monotone.iter().all(|&b| b),
        format!("after t = 0.05, per component {monotone:?}"),
    ));
    if let Some(dir) = out {
        output::write_run(
            &dir.join("boundary_reference"),
            &sys,
            &traj,
            cfg.simulation.x_points,
        )?;
    }
    let elapsed = start.elapsed();
    rows.push(row(
        2,
        "runtime",
        elapsed <= Duration::from_secs(15),
        format!("{elapsed:.2?}"),
    ));
    Ok(rows)
}

pub fn rows(out: Option<&Path>) -> Result<Vec<Row>, CliError> {
    let mut rows = internal_rows(out)?;
    rows.extend(boundary_rows(out)?);
    Ok(rows)
}

pub fn table(rows: &[Row]) -> String {
    let mut text = String::new();
    let width = rows.iter().map(|r| r.name.len()).max().unwrap_or(0);
    for r in rows {
        text.push_str(&format!(
            "  {} {:<width$}  {}  {}\n",
            r.criterion,
            r.name,
            if r.passed { "PASS" } else { "FAIL" },
            r.detail
        ));
    }
    for id in [1, 2] {
        let failed: Vec<&str> = rows
            .iter()
            .filter(|r| r.criterion == id && !r.passed)
            .map(|r| r.name)
            .collect();
        if failed.is_empty() {
            text.push_str(&format!("criterion {id}: PASS\n"));
        } else {
            text.push_str(&format!("criterion {id}: FAIL ({})\n", failed.join(", ")));
        }
    }
    text
}

pub fn repro(out: Option<&Path>) -> Result<bool, CliError> {
    let rows = rows(out)?;
    print!("{}", table(&rows));
    Ok(rows.iter().all(|r| r.passed))
}
