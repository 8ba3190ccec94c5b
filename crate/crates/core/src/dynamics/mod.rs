//! Time marching of the step problems and structure-preservation diagnostics.

mod momenta;

pub use momenta::{angular_momentum, discrete_momenta, linear_momentum, symmetry_defect, Momenta};

use nalgebra::DVector;
use serde::Serialize;

use crate::beam::{BeamMesh, LoadCase, STRAIN_DIM};
use crate::constitutive::{ConstitutiveLaw, MeasurementDataSet};
use crate::error::{Error, Result};
use crate::solver::{
    newton_solve, solve_dcnlp_enumerate, AssignmentMode, Formulation, NewtonOptions, NewtonReport, PrimalDualState,
    StepProblem, WeightMatrix,
};

/// Equidistant partition of `[t_start, t_end]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeGrid {
    t_start: f64,
    t_end: f64,
    dt: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite() && t_start.is_finite() && t_end.is_finite() && t_end > t_start) {
            return Err(Error::InvalidInput(format!(
                "time grid needs dt > 0 and t_end > t_start (got [{t_start}, {t_end}], dt {dt})"
            )));
        }
        let n = (t_end - t_start) / dt;
        let steps = n.round();
        if (n - steps).abs() > 1e-12 * steps.max(1.0) {
            return Err(Error::InvalidInput(format!(
                "dt = {dt} does not divide [{t_start}, {t_end}] into an integer number of steps"
            )));
        }
        Ok(Self {
            t_start,
            t_end,
            dt,
            steps: steps as usize,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    /// `t_i = t_start + i Δt`.
    pub fn time(&self, i: usize) -> f64 {
        self.t_start + i as f64 * self.dt
    }
}

/// Material description driving the step problems.
#[derive(Debug, Clone)]
pub enum Material {
    /// Approximate NLP over a constitutive manifold.
    Manifold(ConstitutiveLaw),
    /// Exact DCNLP over a raw data set.
    Data { data: MeasurementDataSet, mode: AssignmentMode },
}

/// Everything needed to march a beam in time.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub mesh: BeamMesh,
    pub loads: LoadCase,
    pub grid: TimeGrid,
    pub material: Material,
    pub weights: WeightMatrix,
    pub options: NewtonOptions,
    /// Feasibility tolerance of the reference configuration.
    pub feasibility_tol: f64,
}

/// One record of the trajectory; momenta refer to the interval ending at `time`.
#[derive(Debug, Clone)]
pub struct StepRecord {
    pub step: usize,
    pub time: f64,
    pub q: DVector<f64>,
    /// `e_{i−1/2}` and `s_{i−1/2}` of the interval ending here.
    pub e: DVector<f64>,
    pub s: DVector<f64>,
    pub momenta: Momenta,
    pub constraint_violation: f64,
    /// `None` for the initial record.
    pub newton: Option<NewtonReport>,
    /// Chosen data points per element (data-driven material only).
    pub assignment: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub records: Vec<StepRecord>,
}

impl Trajectory {
    pub fn last(&self) -> Option<&StepRecord> {
        self.records.last()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Mean Newton iterations over solved steps.
    pub fn mean_iterations(&self) -> f64 {
        let its: Vec<usize> = self.records.iter().filter_map(|r| r.newton.as_ref().map(|n| n.iterations)).collect();
        if its.is_empty() {
            0.0
        } else {
            its.iter().sum::<usize>() as f64 / its.len() as f64
        }
    }
}

/// Result of [`Simulation::run`]; on failure the partial trajectory is kept.
#[derive(Debug)]
pub struct RunOutcome {
    pub trajectory: Trajectory,
    pub error: Option<Error>,
}

impl RunOutcome {
    pub fn into_result(self) -> Result<Trajectory> {
        match self.error {
            None => Ok(self.trajectory),
            Some(e) => Err(e),
        }
    }
}

/// Mutable state carried from one step to the next.
#[derive(Debug, Clone)]
pub struct MarchState {
    pub step: usize,
    pub q_prev: DVector<f64>,
    pub q_curr: DVector<f64>,
    pub s_prev: DVector<f64>,
    pub last: PrimalDualState,
}

impl Simulation {
    /// Rest start at the reference configuration: `q₋₁ = q₀`, `s₋₁/₂ = 0`.
    pub fn initialize(&self) -> Result<MarchState> {
        let q0 = self.mesh.reference().to_flat();
        let g = self.mesh.constraint_violation(&q0);
        if g > self.feasibility_tol {
            return Err(Error::InvalidInput(format!(
                "reference configuration violates the director constraints (‖g‖∞ = {g:e})"
            )));
        }
        self.loads.check_nodes(self.mesh.n_nodes())?;
        Ok(MarchState {
            step: 0,
            q_prev: q0.clone(),
            q_curr: q0.clone(),
            s_prev: DVector::zeros(STRAIN_DIM * self.mesh.n_elements()),
            last: PrimalDualState::at_rest(&self.mesh, q0),
        })
    }

    fn initial_record(&self, st: &MarchState) -> StepRecord {
        let ne = STRAIN_DIM * self.mesh.n_elements();
        StepRecord {
            step: 0,
            time: self.grid.time(0),
            q: st.q_curr.clone(),
            e: DVector::zeros(ne),
            s: DVector::zeros(ne),
            momenta: Momenta::default(),
            constraint_violation: self.mesh.constraint_violation(&st.q_curr),
            newton: None,
            assignment: None,
        }
    }

    /// Solves step `i → i+1` and returns the record at `t_{i+1}`.
    pub fn advance(&self, st: &mut MarchState) -> Result<StepRecord> {
        let i = st.step;
        let t = self.grid.time(i);
        let dt = self.grid.dt();
        let n = self.mesh.n_nodes();
        let wrap = |source: Error| Error::Step {
            step: i + 1,
            time: t + dt,
            source: Box::new(source),
        };
        let problem = StepProblem::new(
            &self.mesh,
            st.q_prev.clone(),
            st.q_curr.clone(),
            st.s_prev.clone(),
            self.loads.external_load(n, t - 0.5 * dt),
            self.loads.external_load(n, t + 0.5 * dt),
            dt,
            self.weights,
        )
        .map_err(wrap)?;
        let mut guess = st.last.clone();
        guess.q = &st.q_curr * 2.0 - &st.q_prev;

        let (state, report, assignment) = match &self.material {
            Material::Manifold(law) => {
                let (s, r) = newton_solve(&problem, guess, Formulation::Approx(law), &self.options).map_err(wrap)?;
                (s, r, None)
            }
            Material::Data { data, mode } => {
                let sol = solve_dcnlp_enumerate(&problem, data, *mode, &guess, &self.options).map_err(wrap)?;
                (sol.state, sol.report, Some(sol.assignment))
            }
        };

        let momenta = Momenta::of_interval(&self.mesh, &st.q_curr, &state.q, &state.s, dt);
        let record = StepRecord {
            step: i + 1,
            time: self.grid.time(i + 1),
            q: state.q.clone(),
            e: state.e.clone(),
            s: state.s.clone(),
            momenta,
            constraint_violation: self.mesh.constraint_violation(&state.q),
            newton: Some(report),
            assignment,
        };
        st.q_prev = std::mem::replace(&mut st.q_curr, state.q.clone());
        st.s_prev = state.s.clone();
        st.last = state;
        st.step += 1;
        Ok(record)
    }

    /// Marches over the whole grid. `observer` sees every record as soon as
    /// it exists; an observer error stops the run like a solver failure.
    pub fn run(&self, observer: &mut dyn FnMut(&StepRecord) -> Result<()>) -> RunOutcome {
        let mut trajectory = Trajectory::default();
        let mut st = match self.initialize() {
            Ok(st) => st,
            Err(error) => {
                return RunOutcome {
                    trajectory,
                    error: Some(error),
                }
            }
        };
        let first = self.initial_record(&st);
        if let Err(error) = observer(&first) {
            return RunOutcome {
                trajectory,
                error: Some(error),
            };
        }
        trajectory.records.push(first);
        for _ in 0..self.grid.steps() {
            let rec = match self.advance(&mut st) {
                Ok(rec) => rec,
                Err(error) => {
                    return RunOutcome {
                        trajectory,
                        error: Some(error),
                    }
                }
            };
            if let Err(error) = observer(&rec) {
                return RunOutcome {
                    trajectory,
                    error: Some(error),
                };
            }
            trajectory.records.push(rec);
        }
        RunOutcome {
            trajectory,
            error: None,
        }
    }

    pub fn run_to_end(&self) -> Result<Trajectory> {
        self.run(&mut |_| Ok(())).into_result()
    }
}

#[cfg(test)]
mod tests;
