//! Data-driven computational dynamics for geometrically exact director beams.
//!
//! Every time step is an equality-constrained optimization problem: find the
//! next configuration and the element strain/stress pairs closest to the
//! material data (a raw measurement set or a smooth constitutive manifold)
//! subject to compatibility, discrete momentum balance and the nodal
//! orthonormality constraints. The problem is solved by full Newton iteration
//! on its KKT conditions.
//!
//! Module map:
//! - [`beam`]: kinematics, constraints, null-space basis, mass and loads.
//! - [`constitutive`]: manifold residuals `h(ě, š)` and measurement data sets.
//! - [`solver`]: step residuals, KKT systems, Newton and DCNLP enumeration.
//! - [`dynamics`]: time marching and momentum diagnostics.
//! - [`scenario`]: configuration files, presets, outputs and self checks.

pub mod beam;
pub mod constitutive;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod scenario;
pub mod solver;

pub use error::{Error, Result};
