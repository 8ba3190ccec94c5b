//! One time step of a two-element beam solved exactly over a small data set
//! with each assignment strategy.

use nalgebra::DVector;

use ddcd::beam::{BeamMesh, Inertia, Vec6};
use ddcd::constitutive::{ConstitutiveLaw, MeasurementDataSet};
use ddcd::solver::{solve_dcnlp_enumerate, AssignmentMode, NewtonOptions, PrimalDualState, StepProblem, WeightMatrix};

fn main() -> ddcd::Result<()> {
    let mesh = BeamMesh::straight(1.0, 2, Inertia::principal(10.0, 20.0, 20.0))?;
    let q0 = mesh.reference().to_flat();
    let mut f = DVector::zeros(mesh.n_dof());
    // The first node is pulled back twice as hard as the others are pushed
    // forward, so the two elements stretch by different amounts.
    f[2] = -6.0;
    f[14] = 3.0;
    f[26] = 3.0;
    let problem = StepProblem::new(&mesh, q0.clone(), q0.clone(), DVector::zeros(12), f.clone(), f, 0.05, WeightMatrix::identity())?;

    let law = ConstitutiveLaw::benchmark_linear();
    let strains: Vec<Vec6> = (0..9).map(|k| Vec6::new(0.0, 0.0, -0.02 + 0.005 * k as f64, 0.0, 0.0, 0.0)).collect();
    let data = MeasurementDataSet::on_law(&law, &strains, "axial grid")?;
    let init = PrimalDualState::at_rest(&mesh, q0);

    println!("{:<20} {:>10} {:>14} {:>8}", "mode", "assignment", "cost", "solves");
    for mode in [AssignmentMode::Shared, AssignmentMode::CoordinateDescent, AssignmentMode::Exhaustive] {
        let sol = solve_dcnlp_enumerate(&problem, &data, mode, &init, &NewtonOptions::default())?;
        let a: Vec<String> = sol.assignment.iter().map(|k| (k + 1).to_string()).collect();
        println!("{:<20} {:>10} {:>14.6e} {:>8}", format!("{mode:?}"), a.join(","), sol.cost, sol.evaluated);
    }
    Ok(())
}
