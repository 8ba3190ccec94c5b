//! Acceptance suite: one PASS/FAIL line per criterion. Runs the three
//! quarter-arc presets to t = 4 s, so build with optimizations.

use std::process::ExitCode;
use std::time::Instant;

use nalgebra::{DVector, Vector3};

use ddcd::beam::{BeamMesh, Inertia, Vec6, NODE_DOF};
use ddcd::constitutive::{ConstitutiveLaw, DataPoint, MeasurementDataSet};
use ddcd::dynamics::{symmetry_defect, Simulation, Trajectory};
use ddcd::scenario::presets::MIDDLE_NODE;
use ddcd::scenario::{preset, self_check, SelfCheckOptions};
use ddcd::solver::{
    dcnlp_cost, newton_solve, solve_dcnlp_enumerate, AssignmentMode, Formulation, NewtonOptions, PrimalDualState,
    StepProblem, WeightMatrix,
};

const L_TABLE: [f64; 3] = [11.25, 11.25, 7.5];
const NODE11_TABLE: [f64; 3] = [4.11667597, -3.48005560, -2.63093328];
const J_TABLE: [(&str, [f64; 3]); 3] = [
    ("ex1", [1.39915722, 6.17377710, -7.16199130]),
    ("ex2", [2.18791717, 5.90091563, -7.37292831]),
    ("ex3", [0.85015476, 6.85601926, -6.84807263]),
];

const DETERMINISTIC_CHECKS: [&str; 2] = ["mass_matrix", "dcnlp_enumeration"];

struct Run {
    name: String,
    dt: f64,
    sim: Simulation,
    traj: Trajectory,
    wall: f64,
}

fn run_preset(name: &str, dt: f64) -> Run {
    let cfg = preset(name, Some(dt), None, None).expect("preset");
    let scenario = cfg.build(None, name).expect("valid preset");
    let start = Instant::now();
    let traj = scenario.simulation.run_to_end().unwrap_or_else(|e| panic!("{name} at dt = {dt}: {e}"));
    Run {
        name: name.to_string(),
        dt,
        sim: scenario.simulation,
        traj,
        wall: start.elapsed().as_secs_f64(),
    }
}

fn node11(run: &Run) -> Vector3<f64> {
    run.traj.last().expect("records").q.fixed_rows::<3>(NODE_DOF * (MIDDLE_NODE - 1)).into()
}

struct Report {
    failed: usize,
}

impl Report {
    fn line(&mut self, id: usize, passed: bool, what: &str, detail: String) {
        if !passed {
            self.failed += 1;
        }
        println!("{} criterion {id}: {what} ({detail})", if passed { "PASS" } else { "FAIL" });
    }
}

fn impulse_identity(runs: &[&Run]) -> (bool, String) {
    let mut worst = 0.0f64;
    let mut wall = 0.0f64;
    for r in runs {
        let l = r.traj.last().unwrap().momenta.l;
        for k in 0..3 {
            worst = worst.max((l[k].abs() - L_TABLE[k]).abs());
        }
        wall = wall.max(r.wall);
    }
    (
        worst <= 1e-8,
        format!("max ||l_k| - table| = {worst:.2e} over dt in {{0.01, 0.005, 0.0025}}, slowest run {wall:.1} s"),
    )
}

fn conservation(runs: &[&Run]) -> (bool, String) {
    let mut ok = true;
    let mut worst_l = 0.0f64;
    let mut worst_j = 0.0f64;
    for r in runs {
        let recs = &r.traj.records;
        for w in recs.windows(2) {
            if w[0].time < 1.0 + r.dt - 1e-9 {
                continue;
            }
            let (a, b) = (&w[0].momenta, &w[1].momenta);
            for k in 0..3 {
                let dl = (b.l[k] - a.l[k]).abs() / (1.0 + b.l[k].abs());
                let dj = (b.j_minus[k] - a.j_minus[k]).abs() / (1.0 + b.j_minus[k].abs());
                worst_l = worst_l.max(dl);
                worst_j = worst_j.max(dj);
                ok &= dl <= 1e-10 && dj <= 1e-9;
            }
        }
    }
    (ok, format!("max relative drift per step: l {worst_l:.2e} (tol 1e-10), j {worst_j:.2e} (tol 1e-9)"))
}

fn constraints(runs: &[&Run]) -> (bool, String) {
    let worst = runs
        .iter()
        .flat_map(|r| r.traj.records.iter().map(|rec| rec.constraint_violation))
        .fold(0.0, f64::max);
    (worst <= 1e-10, format!("max ||g||_inf = {worst:.2e} over all steps of all runs"))
}

fn newton_efficiency(ex1: &Run) -> (bool, String) {
    let mean = ex1.traj.mean_iterations();
    let mut converged = true;
    let mut max_its = 0;
    for rep in ex1.traj.records.iter().filter_map(|r| r.newton.as_ref()) {
        converged &= rep.final_residual <= 1e-12 * (1.0 + rep.initial_residual);
        max_its = max_its.max(rep.iterations);
    }
    (
        mean <= 5.0 && converged,
        format!("ex1 dt = {}: mean {mean:.3} iterations, max {max_its}, all steps within 1e-12 relative: {converged}", ex1.dt),
    )
}

fn derivative_oracles() -> (bool, String) {
    let report = self_check(&SelfCheckOptions::default());
    let failed: Vec<&str> = report.failures().map(|c| c.family).collect();
    // Mass matrix and enumeration checks are deterministic single cases.
    let min_samples = report
        .checks
        .iter()
        .filter(|c| !DETERMINISTIC_CHECKS.contains(&c.family))
        .map(|c| c.samples)
        .min()
        .unwrap_or(0);
    (
        report.passed() && min_samples >= 20,
        format!(
            "{} families, randomized ones >= {min_samples} samples each, failed: [{}]",
            report.checks.len(),
            failed.join(", ")
        ),
    )
}

fn oracle_equivalence() -> (bool, String) {
    let opts = NewtonOptions::default();
    let inertia = Inertia::principal(10.0, 20.0, 20.0);
    let law = ConstitutiveLaw::benchmark_linear();

    // fixNLP at the manifold point found by the approximate NLP.
    let mesh = BeamMesh::straight(0.5, 1, inertia).unwrap();
    let q0 = mesh.reference().to_flat();
    let mut f = DVector::zeros(mesh.n_dof());
    f[12] = 3.0;
    f[13] = -1.0;
    f[14] = 5.0;
    let p = StepProblem::new(&mesh, q0.clone(), q0.clone(), DVector::zeros(6), -&f, f, 0.01, WeightMatrix::identity())
        .unwrap();
    let init = PrimalDualState::at_rest(&mesh, q0);
    let (app, _) = newton_solve(&p, init.clone(), Formulation::Approx(&law), &opts).unwrap();
    let point = DataPoint::new(
        Vec6::from_column_slice(app.e_check.as_slice()),
        Vec6::from_column_slice(app.s_check.as_slice()),
    );
    let (fix, _) = newton_solve(&p, init, Formulation::Fix(&[point]), &opts).unwrap();
    let dq = (&fix.q - &app.q).amax();

    // Enumeration against brute force over all 81 assignments.
    let mesh = BeamMesh::straight(1.0, 2, inertia).unwrap();
    let q0 = mesh.reference().to_flat();
    let mut f = DVector::zeros(mesh.n_dof());
    f[2] = -4.0;
    f[12] = 0.5;
    f[26] = 4.0;
    let p = StepProblem::new(&mesh, q0.clone(), q0.clone(), DVector::zeros(12), f.clone(), f, 0.05, WeightMatrix::identity())
        .unwrap();
    let strains: Vec<Vec6> = (0..9).map(|k| Vec6::new(0.0, 0.0, -0.02 + 0.005 * k as f64, 0.0, 0.0, 0.0)).collect();
    let data = MeasurementDataSet::on_law(&law, &strains, "grid").unwrap();
    let init = PrimalDualState::at_rest(&mesh, q0);
    let mut brute: Option<(Vec<usize>, f64)> = None;
    for i in 0..9 {
        for j in 0..9 {
            let pts = [data.points()[i], data.points()[j]];
            let (st, _) = newton_solve(&p, init.clone(), Formulation::Fix(&pts), &opts).unwrap();
            let c = dcnlp_cost(&p, &st, &pts);
            if brute.as_ref().map_or(true, |(_, b)| c < *b) {
                brute = Some((vec![i, j], c));
            }
        }
    }
    let (bi, bc) = brute.unwrap();
    let ex = solve_dcnlp_enumerate(&p, &data, AssignmentMode::Exhaustive, &init, &opts).unwrap();
    let same = ex.assignment == bi && ex.cost == bc;
    (
        dq <= 1e-9 && same,
        format!(
            "fix vs approx |dq| = {dq:.2e} (tol 1e-9); enumeration argmin {:?} vs brute force {:?}, cost equal: {}",
            ex.assignment,
            bi,
            ex.cost == bc
        ),
    )
}

fn table_reproduction(ex1: &[&Run]) -> (bool, String) {
    let x: Vec<Vector3<f64>> = ex1.iter().map(|r| node11(r)).collect();
    let table = Vector3::from(NODE11_TABLE);
    let finest = x.last().unwrap();
    let deviation = (finest - table).norm();
    let steps: Vec<f64> = x.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
    let converging = steps.windows(2).all(|s| s[1] < s[0]);
    let l = ex1.last().unwrap().traj.last().unwrap().momenta.l;
    let impulse = (0..3).all(|k| (l[k].abs() - L_TABLE[k]).abs() <= 1e-8);
    (
        converging && deviation <= 5e-3 && impulse,
        format!(
            "node 11 at dt = {}: ({:.8}, {:.8}, {:.8}); deviation from table {deviation:.3e} m (tol 5e-3); \
             successive dt changes {:.2e} > {:.2e}",
            ex1.last().unwrap().dt,
            finest.x,
            finest.y,
            finest.z,
            steps[0],
            steps[1]
        ),
    )
}

fn symmetry(runs: &[&Run]) -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for r in runs {
        let worst = r.traj.records.iter().map(|rec| symmetry_defect(&r.sim.mesh, &rec.q)).fold(0.0, f64::max);
        let passed = if r.name == "ex1" { worst <= 1e-8 } else { worst >= 1e-3 };
        ok &= passed;
        parts.push(format!("{} {worst:.2e}", r.name));
    }
    (ok, format!("max mirror mismatch: {} (ex1 <= 1e-8, ex2/ex3 >= 1e-3)", parts.join(", ")))
}

fn main() -> ExitCode {
    let ex1: Vec<Run> = [0.01, 0.005, 0.0025].iter().map(|&dt| run_preset("ex1", dt)).collect();
    let ex2 = run_preset("ex2", 0.005);
    let ex3 = run_preset("ex3", 0.005);
    let ex1_refs: Vec<&Run> = ex1.iter().collect();
    let all: Vec<&Run> = ex1.iter().chain([&ex2, &ex3]).collect();
    let at_default = [&ex1[1], &ex2, &ex3];

    let mut report = Report { failed: 0 };
    let (ok, d) = impulse_identity(&ex1_refs);
    report.line(1, ok, "impulse identity of ex1", d);
    let (ok, d) = conservation(&all);
    report.line(2, ok, "momentum conservation after the load pulse", d);
    let (ok, d) = constraints(&all);
    report.line(3, ok, "director constraints", d);
    let (ok, d) = newton_efficiency(&ex1[1]);
    report.line(4, ok, "Newton efficiency", d);
    let (ok, d) = derivative_oracles();
    report.line(5, ok, "derivative oracle suite", d);
    let (ok, d) = oracle_equivalence();
    report.line(6, ok, "oracle equivalence", d);
    let (ok, d) = table_reproduction(&ex1_refs);
    report.line(7, ok, "middle node at t = 4 s", d);
    let (ok, d) = symmetry(&at_default);
    report.line(8, ok, "symmetry signature", d);

    for ((name, table), run) in J_TABLE.iter().zip(at_default) {
        let j = run.traj.last().unwrap().momenta.j_minus;
        let dev = (j - Vector3::from(*table)).amax();
        println!(
            "INFO {name} stationary j = ({:.8}, {:.8}, {:.8}), table ({:.8}, {:.8}, {:.8}), max deviation {dev:.2e}",
            j.x, j.y, j.z, table[0], table[1], table[2]
        );
    }

    if report.failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{} criteria failed", report.failed);
        ExitCode::FAILURE
    }
}
