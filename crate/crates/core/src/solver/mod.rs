//! Per-step optimization: balance residual, KKT systems of fixNLP and of the
//! approximate NLP, Newton iteration and DCNLP enumeration.

pub mod dcnlp;
pub mod kkt;
pub mod newton;
pub mod problem;
pub mod state;

pub use dcnlp::{
    dcnlp_cost, solve_dcnlp_enumerate, AssignmentMode, DcnlpSolution, SubproblemFailure, EXHAUSTIVE_MAX_ELEMENTS,
    EXHAUSTIVE_MAX_POINTS,
};
pub use kkt::{kkt_matrix, kkt_matrix_approx, kkt_matrix_fix, kkt_residual, kkt_residual_approx, kkt_residual_fix};
pub use newton::{newton_solve, NewtonOptions, NewtonReport};
pub use problem::{StepProblem, WeightMatrix};
pub use state::{Formulation, Layout, PrimalDualState};
