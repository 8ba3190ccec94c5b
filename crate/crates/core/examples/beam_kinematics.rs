//! Strains of a quarter arc under a few hand-made deformations, and the
//! configuration-dependent operators a step solver needs.

use nalgebra::{Rotation3, Unit, Vector3};

use ddcd::beam::{element_stress, BeamMesh, Configuration, Inertia, Plane, NODE_DOF};

fn main() -> ddcd::Result<()> {
    let mesh = BeamMesh::quarter_arc(2.0 / std::f64::consts::PI, 8, Plane::Xy, Inertia::principal(10.0, 20.0, 20.0))?;
    let q0 = mesh.reference().to_flat();
    println!("nodes {}, elements {}, dofs {}", mesh.n_nodes(), mesh.n_elements(), mesh.n_dof());
    println!("arc length {:.12}", mesh.total_length());
    println!("reference strains max |e| = {:.2e}", mesh.strains(&q0).amax());
    println!("reference ‖g‖∞ = {:.2e}", mesh.constraint_violation(&q0));

    // Rigid rotation about an oblique axis: the strains stay zero.
    let rot = Rotation3::from_axis_angle(&Unit::new_normalize(Vector3::new(1.0, 2.0, -1.0)), 0.7).into_inner();
    let cfg = Configuration::from_flat(&q0)?;
    let rotated = Configuration::new(cfg.nodes.iter().map(|n| n.transformed(&rot, &Vector3::new(0.3, 0.0, 1.0))).collect());
    println!("after rigid motion max |e| = {:.2e}", mesh.strains(&rotated.to_flat()).amax());

    // Stretch all positions by 1 %: only the elongation responds (chord
    // over arc, so slightly below 0.01); the directors and hence the
    // curvatures stay put.
    let mut q = q0.clone();
    for a in 0..mesh.n_nodes() {
        for k in 0..3 {
            q[NODE_DOF * a + k] *= 1.01;
        }
    }
    let e = mesh.strains(&q);
    println!("uniform 1% stretch, element 4 strains:");
    let e4 = element_stress(&e, 3);
    println!(
        "  γ1 {:+.6}  γ2 {:+.6}  γ3 {:+.6}  ω1 {:+.6}  ω2 {:+.6}  ω3 {:+.6}",
        e4[0], e4[1], e4[2], e4[3], e4[4], e4[5]
    );

    // Mass: total translational mass equals e00 · length.
    let m = mesh.mass_matrix();
    let mut total = 0.0;
    for a in 0..mesh.n_nodes() {
        for b in 0..mesh.n_nodes() {
            total += m[(NODE_DOF * a, NODE_DOF * b)];
        }
    }
    println!("translational mass {:.12} kg", total);
    Ok(())
}
