//! Quarter-arc benchmark with the linear law: marches to t = 4 s and prints
//! the stationary momenta and the final position of the middle node.

use std::time::Instant;

use ddcd::beam::{BeamMesh, Inertia, LoadCase, Plane};
use ddcd::constitutive::ConstitutiveLaw;
use ddcd::dynamics::{symmetry_defect, Material, Simulation, TimeGrid};
use ddcd::solver::{NewtonOptions, WeightMatrix};

fn main() -> ddcd::Result<()> {
    let dt: f64 = std::env::args().nth(1).map(|s| s.parse().expect("dt")).unwrap_or(0.005);
    let mesh = BeamMesh::quarter_arc(2.0 / std::f64::consts::PI, 20, Plane::Xy, Inertia::principal(10.0, 20.0, 20.0))?;
    let sim = Simulation {
        mesh,
        loads: LoadCase::arc_benchmark(),
        grid: TimeGrid::new(0.0, 4.0, dt)?,
        material: Material::Manifold(ConstitutiveLaw::benchmark_linear()),
        weights: WeightMatrix::identity(),
        options: NewtonOptions::default(),
        feasibility_tol: 1e-10,
    };
    let start = Instant::now();
    let traj = sim.run_to_end()?;
    let last = traj.last().expect("non-empty trajectory");
    let m = last.momenta;
    println!("steps           {}", traj.len() - 1);
    println!("wall time       {:.2} s", start.elapsed().as_secs_f64());
    println!("mean iterations {:.3}", traj.mean_iterations());
    println!("l               {:.8} {:.8} {:.8}", m.l.x, m.l.y, m.l.z);
    println!("j               {:.8} {:.8} {:.8}", m.j_minus.x, m.j_minus.y, m.j_minus.z);
    let node = last.q.fixed_rows::<3>(12 * 10);
    println!("node 11         {:.8} {:.8} {:.8}", node.x, node.y, node.z);
    println!("symmetry defect {:.3e}", symmetry_defect(&sim.mesh, &last.q));
    Ok(())
}
