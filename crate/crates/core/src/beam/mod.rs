//! Geometrically exact director beam: configurations, element kinematics,
//! nodal constraints, mass and loads.

pub mod config;
pub mod constraint;
pub mod element;
pub mod load;
pub mod mesh;

pub use config::{Configuration, NodeState, NODE_DOF};
pub use constraint::{
    constraint_curvature, constraint_jacobian, constraints, nullspace_basis, CONSTRAINT_DIM, REDUCED_DIM,
};
pub use element::{ElementKernel, Mat24, Mat6x24, Vec24, Vec6, ELEM_DOF, STRAIN_DIM};
pub use load::{Amplitude, LoadCase, NodalForce};
pub use mesh::{element_stress, BeamMesh, Inertia, Plane};
