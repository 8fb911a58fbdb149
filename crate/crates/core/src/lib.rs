//! Modal stabilization of underactuated cascade reaction-diffusion systems.

pub mod boundary;
pub mod certificate;
pub mod error;
pub mod internal;
pub mod linalg;
pub mod model;
pub mod presets;
pub mod quadrature;
pub mod sim;
pub mod spectral;
pub mod transform;

pub use boundary::{BoundaryController, BoundaryDesign};
pub use certificate::{Certificate, Check};
pub use error::{Error, Result};
pub use internal::{InternalController, InternalDesign};
pub use linalg::Matrix;
pub use model::{Actuation, Gamma, PlantSpec, ShapeFn};
pub use sim::{ClosedLoopSystem, Integrator, SimOptions, Trajectory};
pub use spectral::{BcKind, InitialCondition, SpectralBasis};
pub use transform::TransformFamily;
