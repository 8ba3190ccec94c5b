use nalgebra::Vector3;

use super::*;
use crate::beam::{Amplitude, Inertia, NodalForce, Plane};
use crate::constitutive::{sample_data_set, StrainBox};
use crate::solver::StepProblem;

fn small_arc(n: usize) -> BeamMesh {
    BeamMesh::quarter_arc(2.0 / std::f64::consts::PI, n, Plane::Xy, Inertia::principal(10.0, 20.0, 20.0)).unwrap()
}

fn short_pulse() -> LoadCase {
    LoadCase::new(
        vec![
            NodalForce {
                node: 1,
                force: Vector3::new(-10.0, 0.0, -20.0),
            },
            NodalForce {
                node: 2,
                force: Vector3::new(7.5, -7.5, 15.0),
            },
            NodalForce {
                node: 3,
                force: Vector3::new(0.0, 10.0, -20.0),
            },
        ],
        Amplitude::Triangle { peak: 0.05, end: 0.1 },
    )
}

fn sim(mesh: BeamMesh, loads: LoadCase, t_end: f64, dt: f64, material: Material) -> Simulation {
    Simulation {
        mesh,
        loads,
        grid: TimeGrid::new(0.0, t_end, dt).unwrap(),
        material,
        weights: WeightMatrix::identity(),
        options: NewtonOptions::default(),
        feasibility_tol: 1e-10,
    }
}

#[test]
fn time_grid_requires_integer_step_count() {
    let g = TimeGrid::new(0.0, 4.0, 0.005).unwrap();
    assert_eq!(g.steps(), 800);
    assert!((g.time(800) - 4.0).abs() < 1e-12);
    assert_eq!(TimeGrid::new(0.0, 4.0, 0.0025).unwrap().steps(), 1600);
    assert!(TimeGrid::new(0.0, 1.0, 0.3).is_err());
    assert!(TimeGrid::new(0.0, 1.0, 0.0).is_err());
    assert!(TimeGrid::new(1.0, 1.0, 0.1).is_err());
}

#[test]
fn unloaded_beam_stays_at_rest() {
    let s = sim(
        small_arc(4),
        LoadCase::none(),
        0.05,
        0.01,
        Material::Manifold(ConstitutiveLaw::benchmark_explicit()),
    );
    let traj = s.run_to_end().unwrap();
    assert_eq!(traj.len(), 6);
    let q0 = s.mesh.reference().to_flat();
    for r in &traj.records {
        assert!((&r.q - &q0).amax() < 1e-13);
        assert!(r.s.amax() < 1e-10);
        assert!(r.momenta.l.amax() < 1e-12 && r.momenta.j_minus.amax() < 1e-12);
    }
}

#[test]
fn momenta_conserved_after_loads_vanish() {
    let loads = short_pulse();
    let resultant = loads.static_resultant() * loads.amplitude.impulse().unwrap();
    let s = sim(small_arc(4), loads, 0.3, 0.01, Material::Manifold(ConstitutiveLaw::benchmark_linear()));
    let traj = s.run_to_end().unwrap();
    let free: Vec<&StepRecord> = traj.records.iter().filter(|r| r.time >= 0.1 + 0.01 - 1e-12).collect();
    assert!(free.len() > 10);
    let m0 = free[0].momenta;
    assert!((m0.l - resultant).amax() < 1e-10 * resultant.amax());
    for r in &free {
        assert!((r.momenta.l - m0.l).amax() < 1e-9);
        assert!((r.momenta.j_minus - m0.j_minus).amax() < 1e-8);
        assert!((r.momenta.j_plus - r.momenta.j_minus).amax() < 1e-8);
        assert!(r.constraint_violation < 1e-10);
    }
    assert!(m0.j_minus.norm() > 1e-3);
}

#[test]
fn momenta_satisfy_projected_balance() {
    let loads = short_pulse();
    let s = sim(small_arc(3), loads.clone(), 0.08, 0.01, Material::Manifold(ConstitutiveLaw::benchmark_implicit()));
    let traj = s.run_to_end().unwrap();
    let dt = s.grid.dt();
    let n = s.mesh.n_nodes();
    for w in traj.records.windows(3) {
        let (a, b, c) = (&w[0], &w[1], &w[2]);
        let (_, p_plus) = discrete_momenta(&s.mesh, &a.q, &b.q, &b.s, dt);
        let (p_minus, _) = discrete_momenta(&s.mesh, &b.q, &c.q, &c.s, dt);
        let f = (loads.external_load(n, b.time - 0.5 * dt) + loads.external_load(n, b.time + 0.5 * dt)) * (0.5 * dt);
        // Reuse the step problem only for its null-space projection at q_b.
        let problem = StepProblem::new(
            &s.mesh,
            a.q.clone(),
            b.q.clone(),
            b.s.clone(),
            f.clone(),
            f.clone(),
            dt,
            s.weights,
        )
        .unwrap();
        let r = problem.project(&(p_minus - p_plus - f));
        assert!(r.amax() < 1e-9, "projected balance {}", r.amax());
    }
}

#[test]
fn linear_response_of_symmetric_arc_stays_symmetric() {
    let mesh = small_arc(4);
    let loads = LoadCase::new(
        vec![
            NodalForce {
                node: 1,
                force: Vector3::new(-10.0, 0.0, -20.0),
            },
            NodalForce {
                node: 3,
                force: Vector3::new(0.0, 10.0, -20.0),
            },
        ],
        Amplitude::Triangle { peak: 0.05, end: 0.1 },
    );
    let s = sim(mesh, loads, 0.15, 0.01, Material::Manifold(ConstitutiveLaw::benchmark_linear()));
    assert!(symmetry_defect(&s.mesh, &s.mesh.reference().to_flat()) < 1e-14);
    let traj = s.run_to_end().unwrap();
    let last = traj.last().unwrap();
    assert!((&last.q - &s.mesh.reference().to_flat()).amax() > 1e-4);
    assert!(symmetry_defect(&s.mesh, &last.q) < 1e-9);
}

#[test]
fn failure_keeps_partial_trajectory() {
    let mut s = sim(small_arc(4), short_pulse(), 0.05, 0.01, Material::Manifold(ConstitutiveLaw::benchmark_linear()));
    s.options.max_iterations = 1;
    let out = s.run(&mut |_| Ok(()));
    assert_eq!(out.trajectory.len(), 1);
    match out.error {
        Some(Error::Step { step, source, .. }) => {
            assert_eq!(step, 1);
            assert!(matches!(*source, Error::MaxIterations { .. }));
        }
        other => panic!("unexpected outcome {other:?}"),
    }
}

#[test]
fn infeasible_reference_is_rejected() {
    let mut s = sim(small_arc(2), LoadCase::none(), 0.02, 0.01, Material::Manifold(ConstitutiveLaw::benchmark_linear()));
    let mut nodes = s.mesh.reference().clone();
    let mut q = nodes.to_flat();
    q[3] += 0.1;
    nodes = crate::beam::Configuration::from_flat(&q).unwrap();
    s.mesh = BeamMesh::new(
        nodes,
        s.mesh.elements().to_vec(),
        &[s.mesh.length(0), s.mesh.length(1)],
        *s.mesh.inertia(),
    )
    .unwrap();
    assert!(matches!(s.initialize(), Err(Error::InvalidInput(_))));
}

#[test]
fn data_driven_march_records_assignments() {
    let mesh = small_arc(2);
    let law = ConstitutiveLaw::benchmark_linear();
    let data = sample_data_set(&law, &StrainBox::symmetric(0.02).unwrap(), 5, 0.0, 7).unwrap();
    let s = sim(
        mesh,
        LoadCase::new(
            vec![NodalForce {
                node: 1,
                force: Vector3::new(0.0, 0.0, 5.0),
            }],
            Amplitude::Triangle { peak: 0.02, end: 0.04 },
        ),
        0.03,
        0.01,
        Material::Data {
            data,
            mode: AssignmentMode::Shared,
        },
    );
    let traj = s.run_to_end().unwrap();
    assert_eq!(traj.len(), 4);
    for r in &traj.records[1..] {
        let a = r.assignment.as_ref().unwrap();
        assert_eq!(a.len(), 2);
        assert!(a.iter().all(|&k| k < 5));
        assert!(r.constraint_violation < 1e-10);
    }
}
