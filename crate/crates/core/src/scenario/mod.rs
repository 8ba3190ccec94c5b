//! Batch front end: scenario files, benchmark presets, output streams, the
//! self-check suite and the DCNLP comparison runner.

pub mod config;
pub mod dcnlp_toy;
pub mod output;
pub mod presets;
pub mod selfcheck;

pub use config::{load_scenario, parse_scenario, OutputSpec, Scenario, ScenarioConfig};
pub use dcnlp_toy::{
    axial_grid, axial_toy_simulation, compare_with_manifold, grid_refinement_study, RefinementLevel, ToyReport,
    ToyStep,
};
pub use output::{run_scenario, FailureReport, OutputWriter, RunSummary};
pub use presets::{preset, PRESET_NAMES};
pub use selfcheck::{self_check, CheckResult, SelfCheckOptions, SelfCheckReport};

use crate::error::Error;

pub const EXIT_SUCCESS: i32 = 0;
/// Unexpected I/O or serialization problem while writing outputs.
pub const EXIT_IO: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_SELF_CHECK: i32 = 4;

/// Process exit status for an error.
pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::Validation(_) | Error::Config(_) | Error::InvalidInput(_) | Error::DimensionMismatch { .. } => {
            EXIT_VALIDATION
        }
        Error::SingularKkt { .. }
        | Error::MaxIterations { .. }
        | Error::NonFinite(_)
        | Error::Step { .. }
        | Error::AllSubproblemsFailed { .. } => EXIT_SOLVER,
        Error::Io { .. } | Error::Csv(_) | Error::Json(_) => EXIT_IO,
    }
}
