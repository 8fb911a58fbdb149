//! The two reference plants, their initial data and designs.

use std::f64::consts::PI;

use crate::boundary::BoundaryDesign;
use crate::internal::InternalDesign;
use crate::linalg::Matrix;
use crate::model::{Actuation, Gamma, PlantSpec, ShapeFn};
use crate::spectral::{InitialCondition, Trig, TrigTerm};

/// Three-component plant with indicator actuators on [0.1j, 0.1j + 0.1].
pub fn internal_reference() -> PlantSpec {
    PlantSpec {
        length: PI,
        diffusion: vec![4.0, 3.0, 6.0],
        reaction: Matrix::from_row_slice(3, 3, &[10.0, 4.0, 8.0, 1.0, 10.0, 2.0, 0.0, 1.0, 20.0]),
        actuation: Actuation::Internal,
        gamma: Gamma::NEUMANN_DIRICHLET,
        shapes: (1..=3)
            .map(|j| ShapeFn::Indicator {
                a: 0.1 * j as f64,
                b: 0.1 * j as f64 + 0.1,
            })
            .collect(),
        sigma_tolerance: 0.0,
    }
}

pub fn boundary_reference() -> PlantSpec {
    PlantSpec {
        length: PI,
        diffusion: vec![4.0, 5.0, 6.0],
        reaction: Matrix::from_row_slice(
            3,
            3,
            &[10.0, 1.0, 8.0, 1.0, -10.0, 2.0, 0.0, -10.0, -20.0],
        ),
        actuation: Actuation::Boundary,
        gamma: Gamma::NEUMANN_DIRICHLET,
        shapes: vec![],
        sigma_tolerance: 0.0,
    }
}

/// z⁰ = (cos x + 1, 6cos(x/2) + 3, −cos(x/2) − 0.5).
pub fn reference_initial() -> InitialCondition {
    let t = |coef: f64, freq: f64| TrigTerm {
        coef,
        freq,
        kind: Trig::Cos,
    };
    InitialCondition::Trig {
        components: vec![
            vec![t(1.0, 1.0), t(1.0, 0.0)],
            vec![t(6.0, 0.5), t(3.0, 0.0)],
            vec![t(-1.0, 0.5), t(-0.5, 0.0)],
        ],
    }
}

pub fn internal_design() -> InternalDesign {
    InternalDesign {
        pole_gap: 10.0,
        ..InternalDesign::new(9.0)
    }
}

pub fn boundary_design() -> BoundaryDesign {
    BoundaryDesign {
        k_q: Some(10.0),
        mu0: Some(5),
        n_override: Some(3),
        ..BoundaryDesign::new(9.0)
    }
}
