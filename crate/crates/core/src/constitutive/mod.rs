//! Constitutive manifolds `h(ě, š) = 0` and raw measurement data sets.
//!
//! Index convention for strains and stresses: entries 1–3 are shear, shear,
//! elongation (force-conjugate), entries 4–6 are bending, bending, torsion
//! (moment-conjugate).

pub mod data;
pub mod law;

pub use data::{
    noise_residual_bound, sample_data_set, validate_manifold, DataPoint, ManifoldReport, MeasurementDataSet,
    StrainBox,
};
pub use law::{
    benchmark_stiffness, ConsistencyReport, ConstitutiveLaw, Curvature, LawKind, Manifold, Mat6, OperatingRange,
};
