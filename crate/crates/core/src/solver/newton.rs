use serde::{Deserialize, Serialize};

use super::kkt::{kkt_matrix, kkt_residual};
use super::problem::StepProblem;
use super::state::{Formulation, Layout, PrimalDualState};
use crate::error::{Error, Result};
use crate::linalg::{self, Backend};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NewtonOptions {
    /// Relative tolerance: stop when `‖r‖∞ ≤ tolerance (1 + ‖r₀‖∞)`.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub backend: Backend,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            max_iterations: 25,
            backend: Backend::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NewtonReport {
    pub iterations: usize,
    pub initial_residual: f64,
    pub final_residual: f64,
    /// `‖r‖∞` before every iteration and after the last one.
    pub history: Vec<f64>,
}

/// Full-step Newton iteration on the KKT conditions.
pub fn newton_solve(
    problem: &StepProblem,
    initial: PrimalDualState,
    form: Formulation,
    options: &NewtonOptions,
) -> Result<(PrimalDualState, NewtonReport)> {
    if !initial.is_finite() {
        return Err(Error::NonFinite("initial Newton state"));
    }
    let layout = Layout::new(problem.mesh(), form.is_approx());
    let ordering = match options.backend {
        Backend::Banded => layout.ordering(problem.mesh()),
        Backend::Dense => Vec::new(),
    };
    let mut state = initial;
    let mut x = layout.pack(&state);
    let mut history = Vec::new();
    let mut threshold = f64::NAN;
    for iteration in 0.. {
        let r = kkt_residual(problem, &state, form)?;
        let norm = r.amax();
        if !norm.is_finite() || r.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("KKT residual"));
        }
        history.push(norm);
        if iteration == 0 {
            threshold = options.tolerance * (1.0 + norm);
        }
        if norm <= threshold {
            let report = NewtonReport {
                iterations: iteration,
                initial_residual: history[0],
                final_residual: norm,
                history,
            };
            return Ok((state, report));
        }
        if iteration >= options.max_iterations {
            return Err(Error::MaxIterations {
                max_iterations: options.max_iterations,
                history,
            });
        }
        let s = kkt_matrix(problem, &state, form)?;
        let dx = linalg::solve(&s, &(-r), options.backend, &ordering).map_err(|sg| Error::SingularKkt {
            iteration,
            row: sg.row,
            pivot: sg.pivot,
        })?;
        x += dx;
        layout.unpack_into(&x, &mut state);
    }
    unreachable!("the iteration loop only exits by returning")
}
