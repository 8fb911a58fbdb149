//! Run configuration: plant, design goal, simulation settings and initial data.

use std::fs;
use std::path::{Path, PathBuf};

use cascade_core::{
    Actuation, BoundaryDesign, InitialCondition, Integrator, InternalDesign, PlantSpec,
};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    plant: PlantSpec,
    design: serde_json::Value,
    #[serde(default)]
    simulation: Simulation,
    #[serde(default)]
    initial: Option<InitialCondition>,
    #[serde(default)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Simulation {
    /// Retained modes; defaults to max(60, 4N).
    pub n_sim: Option<usize>,
    pub t_final: f64,
    pub dt: f64,
    pub integrator: Integrator,
    /// Grid points for the field CSVs.
    pub x_points: usize,
    /// Fit window for the decay rate; defaults to [0.1, 0.8]·t_final.
    pub window: Option<[f64; 2]>,
}

impl Default for Simulation {
    fn default() -> Self {
        Self {
            n_sim: None,
            t_final: 1.0,
            dt: 1e-3,
            integrator: Integrator::Expm,
            x_points: 101,
            window: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Design {
    Internal(InternalDesign),
    Boundary(BoundaryDesign),
}

impl Design {
    pub fn rate(&self) -> f64 {
        match self {
            Design::Internal(d) => d.delta,
            Design::Boundary(d) => d.delta0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub plant: PlantSpec,
    pub design: Design,
    pub simulation: Simulation,
    pub initial: Option<InitialCondition>,
    pub out: Option<PathBuf>,
}

const MAX_STEPS: f64 = 1e7;
const MAX_X_POINTS: usize = 10_001;

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let raw: RawConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        // the goal key depends on the actuation: delta for internal, delta0 for boundary
        let design = match raw.plant.actuation {
            Actuation::Internal => serde_json::from_value(raw.design).map(Design::Internal),
            Actuation::Boundary => serde_json::from_value(raw.design).map(Design::Boundary),
        }
        .map_err(|e| CliError::Config(format!("design: {e}")))?;
        let cfg = RunConfig {
            plant: raw.plant,
            design,
            simulation: raw.simulation,
            initial: raw.initial,
            out: raw.out,
        };
        cfg.check_ranges()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    fn check_ranges(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        let rate = self.design.rate();
        if !(rate.is_finite() && rate > 0.0) {
            return bad(format!("decay rate {rate} must be positive"));
        }
        if let Design::Internal(d) = &self.design {
            if !(d.pole_gap.is_finite() && d.pole_gap > 0.0) {
                return bad(format!("pole_gap {} must be positive", d.pole_gap));
            }
        }
        let s = &self.simulation;
        if s.n_sim == Some(0) {
            return bad("n_sim must be at least 1".into());
        }
        if !(s.t_final.is_finite() && s.t_final > 0.0) {
            return bad(format!("t_final {} must be positive", s.t_final));
        }
        if !(s.dt.is_finite() && s.dt > 0.0 && s.dt <= s.t_final) {
            return bad(format!("dt {} must lie in (0, t_final]", s.dt));
        }
        if s.t_final / s.dt > MAX_STEPS {
            return bad(format!("t_final / dt exceeds {MAX_STEPS:e} steps"));
        }
        if !(2..=MAX_X_POINTS).contains(&s.x_points) {
            return bad(format!(
                "x_points {} must lie in 2..={MAX_X_POINTS}",
                s.x_points
            ));
        }
        if let Some([a, b]) = s.window {
            if !(0.0 <= a && a < b && b <= s.t_final) {
                return bad(format!(
                    "window [{a}, {b}] must satisfy 0 <= a < b <= t_final"
                ));
            }
        }
        if let Some(z0) = &self.initial {
            if z0.components() != self.plant.m() {
                return bad(format!(
                    "initial condition has {} components, plant has {}",
                    z0.components(),
                    self.plant.m()
                ));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const INTERNAL: &str = include_str!("../examples/internal_reference.json");
    const BOUNDARY: &str = include_str!("../examples/boundary_reference.json");

    #[test]
    fn shipped_configs_parse() {
        let a = RunConfig::from_json(INTERNAL).unwrap();
        assert!(
            matches!(a.design, Design::Internal(ref d) if d.delta == 9.0 && d.pole_gap == 10.0)
        );
        assert_eq!(a.plant, cascade_core::presets::internal_reference());
        assert_eq!(a.initial, Some(cascade_core::presets::reference_initial()));
        let b = RunConfig::from_json(BOUNDARY).unwrap();
        assert!(
            matches!(b.design, Design::Boundary(ref d) if d.k_q == Some(10.0) && d.mu0 == Some(5))
        );
        assert_eq!(b.plant, cascade_core::presets::boundary_reference());
    }

    #[test]
    fn empty_document_reports_position() {
        let err = RunConfig::from_json("").unwrap_err().to_string();
        assert!(err.contains("line 1"), "{err}");
    }

    #[test]
    fn unknown_and_misplaced_fields_rejected() {
        let extra = INTERNAL.replacen("\"plant\"", "\"colour\": 1, \"plant\"", 1);
        assert!(RunConfig::from_json(&extra).is_err());
        // boundary goal key under an internal plant
        let wrong = INTERNAL.replace("\"delta\"", "\"delta0\"");
        let err = RunConfig::from_json(&wrong).unwrap_err().to_string();
        assert!(err.contains("delta0"), "{err}");
    }

    #[test]
    fn ranges_checked() {
        let bad_dt = INTERNAL.replace("\"dt\": 0.001", "\"dt\": -1");
        assert!(RunConfig::from_json(&bad_dt).is_err());
        let bad_grid = INTERNAL.replace("\"x_points\": 101", "\"x_points\": 1");
        assert!(RunConfig::from_json(&bad_grid).is_err());
    }
}
