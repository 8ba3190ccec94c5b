//! Small data-driven runs compared step by step against the approximate NLP
//! over a reference manifold.

use std::path::Path;

use nalgebra::{DVector, Vector3};
use serde::Serialize;

use crate::beam::{element_stress, Amplitude, BeamMesh, Inertia, LoadCase, NodalForce, Vec6};
use crate::constitutive::{ConstitutiveLaw, DataPoint, MeasurementDataSet};
use crate::dynamics::{Material, Simulation, TimeGrid};
use crate::error::{Error, Result};
use crate::solver::{AssignmentMode, NewtonOptions, WeightMatrix};

use super::output::fmt_f64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToyStep {
    pub step: usize,
    pub time: f64,
    /// Data-point index per element.
    pub assignment: Vec<usize>,
    pub dcnlp_cost: f64,
    /// Distance of the approximate-NLP state to its manifold point.
    pub approx_cost: f64,
    pub q_difference: f64,
    pub s_difference: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ToyReport {
    pub steps: Vec<ToyStep>,
}

impl ToyReport {
    pub fn max_q_difference(&self) -> f64 {
        self.steps.iter().map(|s| s.q_difference).fold(0.0, f64::max)
    }

    pub fn max_dcnlp_cost(&self) -> f64 {
        self.steps.iter().map(|s| s.dcnlp_cost).fold(0.0, f64::max)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record([
            "step",
            "t",
            "assignment",
            "dcnlp_cost",
            "approx_cost",
            "q_difference",
            "s_difference",
        ])?;
        for s in &self.steps {
            let assignment: Vec<String> = s.assignment.iter().map(|k| (k + 1).to_string()).collect();
            w.write_record([
                s.step.to_string(),
                fmt_f64(s.time),
                assignment.join(";"),
                fmt_f64(s.dcnlp_cost),
                fmt_f64(s.approx_cost),
                fmt_f64(s.q_difference),
                fmt_f64(s.s_difference),
            ])?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }
}

/// `Σ_e L_e (½|e − ẽ|²_C + ½|s − s̃|²_{C⁻¹})` with per-element targets.
pub fn distance_cost(
    mesh: &BeamMesh,
    weights: &WeightMatrix,
    e: &DVector<f64>,
    s: &DVector<f64>,
    target: impl Fn(usize) -> (Vec6, Vec6),
) -> f64 {
    (0..mesh.n_elements())
        .map(|k| {
            let (te, ts) = target(k);
            let de = element_stress(e, k) - te;
            let ds = element_stress(s, k) - ts;
            let l = mesh.length(k);
            0.5 * l * (de.dot(&(weights.c() * de)) + ds.dot(&(weights.c_inv() * ds)))
        })
        .sum()
}

/// Marches the data-driven simulation and, in lockstep, the same scenario
/// with `reference` as manifold; both start from rest.
pub fn compare_with_manifold(sim: &Simulation, reference: &ConstitutiveLaw) -> Result<ToyReport> {
    let Material::Data { data, .. } = &sim.material else {
        return Err(Error::InvalidInput("DCNLP comparison needs a data-driven material".into()));
    };
    let approx = Simulation {
        material: Material::Manifold(*reference),
        ..sim.clone()
    };
    let mut st_d = sim.initialize()?;
    let mut st_a = approx.initialize()?;
    let mut report = ToyReport::default();
    for _ in 0..sim.grid.steps() {
        let rd = sim.advance(&mut st_d)?;
        let ra = approx.advance(&mut st_a)?;
        let assignment = rd.assignment.clone().unwrap_or_default();
        let points = data.points();
        let dcnlp_cost = distance_cost(&sim.mesh, &sim.weights, &rd.e, &rd.s, |k| {
            let p = points[assignment[k]];
            (p.strain, p.stress)
        });
        let last = &st_a.last;
        let approx_cost = distance_cost(&sim.mesh, &sim.weights, &ra.e, &ra.s, |k| {
            (element_stress(&last.e_check, k), element_stress(&last.s_check, k))
        });
        report.steps.push(ToyStep {
            step: rd.step,
            time: rd.time,
            assignment,
            dcnlp_cost,
            approx_cost,
            q_difference: (&rd.q - &ra.q).amax(),
            s_difference: (&rd.s - &ra.s).amax(),
        });
    }
    Ok(report)
}

/// Data points `(k h e₃, σ(k h e₃))`, `|k h| ≤ half_range`, on the elongation
/// axis of `law`.
pub fn axial_grid(law: &ConstitutiveLaw, spacing: f64, half_range: f64) -> Result<MeasurementDataSet> {
    if !(spacing > 0.0 && half_range >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "grid spacing {spacing} must be positive and half range {half_range} non-negative"
        )));
    }
    let n = (half_range / spacing + 1e-9).floor() as i64;
    let points = (-n..=n)
        .map(|k| {
            let mut e = Vec6::zeros();
            e[2] = k as f64 * spacing;
            let s = law
                .stress(&e)
                .ok_or_else(|| Error::InvalidInput("grid leaves the law's admissible branch".into()))?;
            Ok(DataPoint::new(e, s))
        })
        .collect::<Result<Vec<_>>>()?;
    MeasurementDataSet::new(points, format!("axial grid, spacing {spacing:e}"))
}

/// One straight element of unit length pulled apart along its axis by a
/// short force pulse.
pub fn axial_toy_simulation(data: MeasurementDataSet) -> Result<Simulation> {
    let mesh = BeamMesh::straight(1.0, 1, Inertia::principal(10.0, 20.0, 20.0))?;
    let pull = 2.0;
    let loads = LoadCase::new(
        vec![
            NodalForce {
                node: 0,
                force: Vector3::new(0.0, 0.0, -pull),
            },
            NodalForce {
                node: 1,
                force: Vector3::new(0.0, 0.0, pull),
            },
        ],
        Amplitude::Triangle { peak: 0.1, end: 0.2 },
    );
    Ok(Simulation {
        mesh,
        loads,
        grid: TimeGrid::new(0.0, 0.4, 0.01)?,
        material: Material::Data {
            data,
            mode: AssignmentMode::Shared,
        },
        weights: WeightMatrix::identity(),
        options: NewtonOptions::default(),
        feasibility_tol: 1e-10,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefinementLevel {
    pub spacing: f64,
    pub points: usize,
    pub max_q_difference: f64,
    pub max_dcnlp_cost: f64,
}

/// Axial toy problem on nested grids of noise-free linear-law data, each
/// compared against the approximate NLP over the same law.
pub fn grid_refinement_study(spacings: &[f64], half_range: f64) -> Result<Vec<RefinementLevel>> {
    let law = ConstitutiveLaw::benchmark_linear();
    spacings
        .iter()
        .map(|&h| {
            let data = axial_grid(&law, h, half_range)?;
            let points = data.len();
            let sim = axial_toy_simulation(data)?;
            let report = compare_with_manifold(&sim, &law)?;
            Ok(RefinementLevel {
                spacing: h,
                points,
                max_q_difference: report.max_q_difference(),
                max_dcnlp_cost: report.max_dcnlp_cost(),
            })
        })
        .collect()
}
