//! Green's functions of obliquely reflected Brownian motion in the quadrant:
//! kernel geometry, saddle points, poles, Laplace-transform estimators,
//! contour inversion and the asymptotic expansion in every direction.

pub mod asymptotics;
pub mod batch;
pub mod error;
pub mod inversion;
pub mod kernel;
pub mod laplace;
pub mod model;
pub mod poles;
pub mod quad;
pub mod saddle;
pub mod simulate;
pub mod special;

pub use error::{Error, ModelError, Result};
pub use model::{ConeParams, PolarPoint, QuadrantParams};
