//! Nodal orthonormality constraints of the director triad and the
//! null-space basis of their Jacobian.

use nalgebra::{Matrix3, SMatrix, SVector, Vector3};

use super::config::{NodeState, D1, D2, D3, NODE_DOF, PHI};
use crate::linalg::hat;

/// Constraints per node.
pub const CONSTRAINT_DIM: usize = 6;
/// Reduced (unconstrained) degrees of freedom per node.
pub const REDUCED_DIM: usize = 6;

pub type Vec6 = SVector<f64, CONSTRAINT_DIM>;
pub type Mat6x12 = SMatrix<f64, CONSTRAINT_DIM, NODE_DOF>;
pub type Mat12 = SMatrix<f64, NODE_DOF, NODE_DOF>;
pub type Mat12x6 = SMatrix<f64, NODE_DOF, REDUCED_DIM>;

/// `g = ½(d₁·d₁−1, d₂·d₂−1, d₃·d₃−1, 2d₂·d₃, 2d₁·d₃, 2d₁·d₂)`.
pub fn constraints(node: &NodeState) -> Vec6 {
    let (d1, d2, d3) = (&node.d1, &node.d2, &node.d3);
    Vec6::new(
        0.5 * (d1.dot(d1) - 1.0),
        0.5 * (d2.dot(d2) - 1.0),
        0.5 * (d3.dot(d3) - 1.0),
        d2.dot(d3),
        d1.dot(d3),
        d1.dot(d2),
    )
}

/// `G = ∂g/∂q` for one node.
pub fn constraint_jacobian(node: &NodeState) -> Mat6x12 {
    let mut g = Mat6x12::zeros();
    let mut put = |row: usize, col: usize, v: &Vector3<f64>| {
        g.fixed_view_mut::<1, 3>(row, col).copy_from(&v.transpose());
    };
    put(0, D1, &node.d1);
    put(1, D2, &node.d2);
    put(2, D3, &node.d3);
    put(3, D2, &node.d3);
    put(3, D3, &node.d2);
    put(4, D1, &node.d3);
    put(4, D3, &node.d1);
    put(5, D1, &node.d2);
    put(5, D2, &node.d1);
    g
}

/// `V(ν) = ∂_q(G(q)ᵀ ν)`; constant in `q`.
pub fn constraint_curvature(nu: &Vec6) -> Mat12 {
    // Director-director coupling coefficients, rows/cols ordered d₁ d₂ d₃.
    let c = Matrix3::new(nu[0], nu[5], nu[4], nu[5], nu[1], nu[3], nu[4], nu[3], nu[2]);
    let offsets = [D1, D2, D3];
    let mut v = Mat12::zeros();
    for (i, &oi) in offsets.iter().enumerate() {
        for (j, &oj) in offsets.iter().enumerate() {
            v.fixed_view_mut::<3, 3>(oi, oj)
                .copy_from(&(Matrix3::identity() * c[(i, j)]));
        }
    }
    v
}

/// `N(q)` with `N (v, ω) = (v, ω×d₁, ω×d₂, ω×d₃)`.
pub fn nullspace_basis(node: &NodeState) -> Mat12x6 {
    let mut n = Mat12x6::zeros();
    n.fixed_view_mut::<3, 3>(PHI, 0).copy_from(&Matrix3::identity());
    for (off, d) in [(D1, &node.d1), (D2, &node.d2), (D3, &node.d3)] {
        n.fixed_view_mut::<3, 3>(off, 3).copy_from(&(-hat(d)));
    }
    n
}

/// `‖g(q)‖∞` over all nodes.
pub fn max_violation<'a>(nodes: impl IntoIterator<Item = &'a NodeState>) -> f64 {
    nodes
        .into_iter()
        .map(|n| constraints(n).amax())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{fd_jacobian, random_rotation, random_svector, random_vector3};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn vec_to_node(q: &SVector<f64, 12>) -> NodeState {
        NodeState::from_slice(q.as_slice())
    }

    fn random_triad_node(rng: &mut ChaCha8Rng) -> NodeState {
        let r = random_rotation(rng);
        NodeState::new(random_vector3(rng, 2.0), r.column(0).into(), r.column(1).into(), r.column(2).into())
    }

    #[test]
    fn orthonormal_triad_is_feasible() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            assert!(constraints(&random_triad_node(&mut rng)).amax() < 1e-15);
        }
    }

    #[test]
    fn parallel_directors_violate_orthogonality() {
        let x = Vector3::x();
        let n = NodeState::new(Vector3::zeros(), x, x, x);
        assert_eq!(constraints(&n), Vec6::new(0.0, 0.0, 0.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn stretched_director_violates_unit_length() {
        let mut n = NodeState::canonical(Vector3::zeros());
        n.d1 = Vector3::new(2.0, 0.0, 0.0);
        assert_eq!(constraints(&n), Vec6::new(1.5, 0.0, 0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn jacobian_matches_fd_and_first_row() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let q: SVector<f64, 12> = random_svector(&mut rng, 1.0);
            let fd = fd_jacobian(|x| constraints(&vec_to_node(x)), &q, 1e-6);
            let g = constraint_jacobian(&vec_to_node(&q));
            assert!((fd - g).amax() <= 1e-8 * g.amax());
        }
        let g = constraint_jacobian(&NodeState::canonical(Vector3::zeros()));
        let mut row = SMatrix::<f64, 1, 12>::zeros();
        row[D1] = 1.0;
        assert_eq!(g.row(0), row);
    }

    #[test]
    fn nullspace_annihilated_by_jacobian() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut worst = 0.0_f64;
        for _ in 0..100 {
            let node = random_triad_node(&mut rng);
            worst = worst.max((constraint_jacobian(&node) * nullspace_basis(&node)).amax());
        }
        assert!(worst <= 1e-14, "{worst:e}");
    }

    #[test]
    fn nullspace_columns_are_infinitesimal_rotations() {
        let node = NodeState::canonical(Vector3::zeros());
        let omega = Vector3::new(0.3, -0.2, 0.9);
        let mut x = SVector::<f64, 6>::zeros();
        x.fixed_rows_mut::<3>(3).copy_from(&omega);
        let y = nullspace_basis(&node) * x;
        assert_eq!(y.fixed_rows::<3>(PHI).into_owned(), Vector3::zeros());
        for (off, d) in [(D1, node.d1), (D2, node.d2), (D3, node.d3)] {
            assert!((y.fixed_rows::<3>(off) - omega.cross(&d)).amax() < 1e-15);
        }
        let sv = nullspace_basis(&node).singular_values();
        assert!(sv.iter().all(|s| *s > 0.5));
    }

    #[test]
    fn curvature_matches_fd_and_is_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        assert_eq!(constraint_curvature(&Vec6::zeros()), Mat12::zeros());
        for _ in 0..20 {
            let nu: Vec6 = random_svector(&mut rng, 1.0);
            let q: SVector<f64, 12> = random_svector(&mut rng, 1.0);
            let v = constraint_curvature(&nu);
            assert_eq!(v, v.transpose());
            let fd = fd_jacobian(|x| constraint_jacobian(&vec_to_node(x)).transpose() * nu, &q, 1e-6);
            assert!((fd - v).amax() <= 1e-8 * v.amax());
        }
    }
}
