use nalgebra::{DVector, Vector3};

use crate::beam::{BeamMesh, NODE_DOF};

/// Linear and angular momentum of one time interval `[t_i, t_{i+1}]`.
///
/// `j_minus` pairs `q_i` with the left momentum `p⁻_i`, `j_plus` pairs
/// `q_{i+1}` with the right momentum `p⁺_{i+1}`. Both agree up to round-off
/// for an exact step solution, so their difference is a useful diagnostic.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Momenta {
    pub l: Vector3<f64>,
    pub j_minus: Vector3<f64>,
    pub j_plus: Vector3<f64>,
}

impl Momenta {
    pub fn of_interval(mesh: &BeamMesh, q_a: &DVector<f64>, q_b: &DVector<f64>, s: &DVector<f64>, dt: f64) -> Self {
        let (p_minus, p_plus) = discrete_momenta(mesh, q_a, q_b, s, dt);
        Self {
            l: linear_momentum(&p_minus),
            j_minus: angular_momentum(q_a, &p_minus),
            j_plus: angular_momentum(q_b, &p_plus),
        }
    }
}

/// `p∓ = M (q_b − q_a)/Δt ± (Δt/2) Σₑ Lₑ Bₑ(q_mid)ᵀ sₑ`.
pub fn discrete_momenta(
    mesh: &BeamMesh,
    q_a: &DVector<f64>,
    q_b: &DVector<f64>,
    s: &DVector<f64>,
    dt: f64,
) -> (DVector<f64>, DVector<f64>) {
    let v = (q_b - q_a) / dt;
    let mv = mesh.apply_mass(&v);
    let q_mid = (q_a + q_b) * 0.5;
    let fint = mesh.internal_force(&q_mid, s) * (0.5 * dt);
    (&mv + &fint, &mv - &fint)
}

/// Sum of the placement blocks.
pub fn linear_momentum(p: &DVector<f64>) -> Vector3<f64> {
    let mut l = Vector3::zeros();
    for a in 0..p.len() / NODE_DOF {
        l += p.fixed_rows::<3>(NODE_DOF * a);
    }
    l
}

/// `Σ_a Σ_k q_a^k × p_a^k` over the four 3-vector blocks of every node.
pub fn angular_momentum(q: &DVector<f64>, p: &DVector<f64>) -> Vector3<f64> {
    let mut j = Vector3::zeros();
    for k in 0..q.len() / 3 {
        let x: Vector3<f64> = q.fixed_rows::<3>(3 * k).into();
        let y: Vector3<f64> = p.fixed_rows::<3>(3 * k).into();
        j += x.cross(&y);
    }
    j
}

/// Largest placement mismatch between node `k` mirrored across the
/// perpendicular bisector plane of the end nodes (in the reference
/// configuration) and node `n − 1 − k`.
pub fn symmetry_defect(mesh: &BeamMesh, q: &DVector<f64>) -> f64 {
    let reference = mesh.reference().to_flat();
    let n = mesh.n_nodes();
    let first: Vector3<f64> = reference.fixed_rows::<3>(0).into();
    let last: Vector3<f64> = reference.fixed_rows::<3>(NODE_DOF * (n - 1)).into();
    let chord = last - first;
    if chord.norm() == 0.0 {
        return f64::NAN;
    }
    let normal = chord.normalize();
    let mid = (first + last) * 0.5;
    let mirror = |x: Vector3<f64>| x - normal * (2.0 * (x - mid).dot(&normal));
    (0..n)
        .map(|k| {
            let x: Vector3<f64> = q.fixed_rows::<3>(NODE_DOF * k).into();
            let y: Vector3<f64> = q.fixed_rows::<3>(NODE_DOF * (n - 1 - k)).into();
            (mirror(x) - y).amax()
        })
        .fold(0.0, f64::max)
}
