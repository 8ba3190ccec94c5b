//! Exact discrete-continuous step problem solved by enumeration of data
//! assignments; every candidate assignment is a smooth fixNLP.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::newton::{newton_solve, NewtonOptions, NewtonReport};
use super::problem::StepProblem;
use super::state::{Formulation, PrimalDualState};
use crate::beam::element_stress;
use crate::constitutive::{DataPoint, MeasurementDataSet};
use crate::error::{Error, Result};

/// Largest mesh and data set for which exhaustive per-element enumeration is allowed.
pub const EXHAUSTIVE_MAX_ELEMENTS: usize = 3;
pub const EXHAUSTIVE_MAX_POINTS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssignmentMode {
    /// One data point shared by all elements; exact minimizer over the set.
    #[default]
    Shared,
    /// Single-element swaps starting from the shared optimum until no swap
    /// lowers the cost (local optimum).
    CoordinateDescent,
    /// All `|D|^E` per-element assignments (small problems only).
    Exhaustive,
}

/// `J = Σ_e L_e (½|e − ẽ|²_C + ½|s − s̃|²_{C⁻¹})`.
pub fn dcnlp_cost(problem: &StepProblem, state: &PrimalDualState, points: &[DataPoint]) -> f64 {
    let mut cost = 0.0;
    for (e, p) in points.iter().enumerate() {
        let (w, w_inv) = problem.element_weights(e);
        let de = element_stress(&state.e, e) - p.strain;
        let ds = element_stress(&state.s, e) - p.stress;
        cost += 0.5 * de.dot(&(w * de)) + 0.5 * ds.dot(&(w_inv * ds));
    }
    cost
}

#[derive(Debug)]
pub struct SubproblemFailure {
    pub assignment: Vec<usize>,
    pub error: Error,
}

#[derive(Debug)]
pub struct DcnlpSolution {
    pub state: PrimalDualState,
    /// Data-point index per element.
    pub assignment: Vec<usize>,
    pub cost: f64,
    pub report: NewtonReport,
    /// Number of fixNLP solves performed.
    pub evaluated: usize,
    pub failures: Vec<SubproblemFailure>,
}

struct Candidate {
    state: PrimalDualState,
    cost: f64,
    report: NewtonReport,
}

struct Enumerator<'p, 'a> {
    problem: &'p StepProblem<'a>,
    data: &'p MeasurementDataSet,
    initial: &'p PrimalDualState,
    options: &'p NewtonOptions,
    cache: HashMap<Vec<usize>, Option<(f64, usize)>>,
    solved: Vec<Candidate>,
    failures: Vec<SubproblemFailure>,
}

impl<'p, 'a> Enumerator<'p, 'a> {
    /// Cost of an assignment, or `None` if its fixNLP failed.
    fn cost(&mut self, assignment: &[usize]) -> Option<f64> {
        if let Some(hit) = self.cache.get(assignment) {
            return hit.map(|(c, _)| c);
        }
        let points: Vec<DataPoint> = assignment.iter().map(|&k| self.data.points()[k]).collect();
        let result = newton_solve(self.problem, self.initial.clone(), Formulation::Fix(&points), self.options);
        let entry = match result {
            Ok((state, report)) => {
                let cost = dcnlp_cost(self.problem, &state, &points);
                self.solved.push(Candidate { state, cost, report });
                Some((cost, self.solved.len() - 1))
            }
            Err(error) => {
                self.failures.push(SubproblemFailure {
                    assignment: assignment.to_vec(),
                    error,
                });
                None
            }
        };
        self.cache.insert(assignment.to_vec(), entry);
        entry.map(|(c, _)| c)
    }

    fn finish(mut self, best: Option<(Vec<usize>, f64)>) -> Result<DcnlpSolution> {
        let evaluated = self.cache.len();
        match best {
            Some((assignment, _)) => {
                let (_, idx) = self.cache[&assignment].expect("best assignment was solved");
                let cand = self.solved.swap_remove(idx);
                Ok(DcnlpSolution {
                    state: cand.state,
                    assignment,
                    cost: cand.cost,
                    report: cand.report,
                    evaluated,
                    failures: self.failures,
                })
            }
            None => {
                let count = self.failures.len();
                let first = self
                    .failures
                    .into_iter()
                    .next()
                    .map(|f| f.error)
                    .unwrap_or_else(|| Error::InvalidInput("no assignment evaluated".into()));
                Err(Error::AllSubproblemsFailed {
                    count,
                    first: Box::new(first),
                })
            }
        }
    }
}

/// Keeps the first strictly better candidate, so ties go to the assignment
/// visited first (lowest indices in the visiting order).
fn improve(best: &mut Option<(Vec<usize>, f64)>, assignment: &[usize], cost: Option<f64>) -> bool {
    match (cost, best.as_ref()) {
        (Some(c), None) => {
            *best = Some((assignment.to_vec(), c));
            true
        }
        (Some(c), Some((_, b))) if c < *b => {
            *best = Some((assignment.to_vec(), c));
            true
        }
        _ => false,
    }
}

/// Solves the exact step problem over `data` by enumeration. Every fixNLP
/// starts from `initial`.
pub fn solve_dcnlp_enumerate(
    problem: &StepProblem,
    data: &MeasurementDataSet,
    mode: AssignmentMode,
    initial: &PrimalDualState,
    options: &NewtonOptions,
) -> Result<DcnlpSolution> {
    if data.is_empty() {
        return Err(Error::InvalidInput("DCNLP needs a non-empty data set".into()));
    }
    let n_el = problem.mesh().n_elements();
    let n_pts = data.len();
    let mut en = Enumerator {
        problem,
        data,
        initial,
        options,
        cache: HashMap::new(),
        solved: Vec::new(),
        failures: Vec::new(),
    };
    let mut best: Option<(Vec<usize>, f64)> = None;

    let shared_best = |en: &mut Enumerator, best: &mut Option<(Vec<usize>, f64)>| {
        for k in 0..n_pts {
            let assignment = vec![k; n_el];
            let c = en.cost(&assignment);
            improve(best, &assignment, c);
        }
    };

    match mode {
        AssignmentMode::Shared => shared_best(&mut en, &mut best),
        AssignmentMode::CoordinateDescent => {
            shared_best(&mut en, &mut best);
            loop {
                let Some((current, _)) = best.clone() else { break };
                let mut changed = false;
                for e in 0..n_el {
                    let mut base = best.clone().expect("best exists").0;
                    for k in 0..n_pts {
                        if k == base[e] {
                            continue;
                        }
                        base[e] = k;
                        let c = en.cost(&base);
                        if improve(&mut best, &base, c) {
                            changed = true;
                        }
                        base[e] = best.as_ref().expect("best exists").0[e];
                    }
                }
                if !changed || best.as_ref().map(|b| &b.0) == Some(&current) {
                    break;
                }
            }
        }
        AssignmentMode::Exhaustive => {
            if n_el > EXHAUSTIVE_MAX_ELEMENTS || n_pts > EXHAUSTIVE_MAX_POINTS {
                return Err(Error::InvalidInput(format!(
                    "exhaustive enumeration is limited to {EXHAUSTIVE_MAX_ELEMENTS} elements and \
                     {EXHAUSTIVE_MAX_POINTS} data points (got {n_el} and {n_pts})"
                )));
            }
            // Lexicographic order with element 0 most significant.
            let mut assignment = vec![0; n_el];
            loop {
                let c = en.cost(&assignment);
                improve(&mut best, &assignment, c);
                let mut pos = n_el;
                loop {
                    if pos == 0 {
                        return en.finish(best);
                    }
                    pos -= 1;
                    assignment[pos] += 1;
                    if assignment[pos] < n_pts {
                        break;
                    }
                    assignment[pos] = 0;
                }
            }
        }
    }
    en.finish(best)
}
