use nalgebra::{DMatrix, DVector, Matrix3, SMatrix, Vector3};
use serde::{Deserialize, Serialize};

use super::config::{node_slice, Configuration, NodeState, NODE_DOF};
use super::constraint::max_violation;
use super::element::{ElementKernel, Mat24, Vec24, Vec6, ELEM_DOF, STRAIN_DIM};
use crate::error::{Error, Result};

pub type Mat12 = SMatrix<f64, NODE_DOF, NODE_DOF>;

/// Cross-section inertia coefficients `𝓔ᵢⱼ = ∫ ρ₀ θⁱ θʲ dA`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Inertia {
    pub e00: f64,
    pub e11: f64,
    pub e22: f64,
    #[serde(default)]
    pub e01: f64,
    #[serde(default)]
    pub e02: f64,
    #[serde(default)]
    pub e12: f64,
}

impl Inertia {
    pub fn principal(e00: f64, e11: f64, e22: f64) -> Self {
        Self {
            e00,
            e11,
            e22,
            e01: 0.0,
            e02: 0.0,
            e12: 0.0,
        }
    }

    /// 3×3 coefficient matrix over (φ₀, d₁, d₂).
    pub fn coefficients(&self) -> Matrix3<f64> {
        Matrix3::new(
            self.e00, self.e01, self.e02, self.e01, self.e11, self.e12, self.e02, self.e12, self.e22,
        )
    }

    pub fn is_finite(&self) -> bool {
        self.coefficients().iter().all(|v| v.is_finite())
    }

    /// Positive semidefinite test via the symmetric eigenvalues.
    pub fn is_psd(&self) -> bool {
        let ev = self.coefficients().symmetric_eigenvalues();
        let scale = ev.amax().max(1.0);
        ev.iter().all(|&l| l >= -1e-12 * scale)
    }

    /// Mass matrix per unit length: blocks `𝓔ᵢⱼ I` with a zero `d₃` row and column.
    pub fn mass_per_length(&self) -> Mat12 {
        let c = self.coefficients();
        let mut m = Mat12::zeros();
        for i in 0..3 {
            for j in 0..3 {
                m.fixed_view_mut::<3, 3>(3 * i, 3 * j)
                    .copy_from(&(Matrix3::identity() * c[(i, j)]));
            }
        }
        m
    }
}

/// Plane containing a planar reference curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Plane {
    #[default]
    Xy,
    Yz,
    Zx,
}

impl Plane {
    /// Cyclic axis permutation mapping the x–y plane onto this plane.
    fn map(&self, v: Vector3<f64>) -> Vector3<f64> {
        match self {
            Plane::Xy => v,
            Plane::Yz => Vector3::new(v.z, v.x, v.y),
            Plane::Zx => Vector3::new(v.y, v.z, v.x),
        }
    }
}

/// Two-node element mesh of a director beam together with its constant data.
#[derive(Debug, Clone)]
pub struct BeamMesh {
    reference: Configuration,
    elements: Vec<[usize; 2]>,
    kernels: Vec<ElementKernel>,
    inertia: Inertia,
}

impl BeamMesh {
    /// `lengths[e]` is the reference arc length of element `e`.
    pub fn new(
        reference: Configuration,
        elements: Vec<[usize; 2]>,
        lengths: &[f64],
        inertia: Inertia,
    ) -> Result<Self> {
        if elements.len() != lengths.len() {
            return Err(Error::DimensionMismatch {
                what: "element lengths",
                expected: elements.len(),
                got: lengths.len(),
            });
        }
        if elements.is_empty() {
            return Err(Error::InvalidInput("mesh has no elements".into()));
        }
        if !inertia.is_finite() {
            return Err(Error::InvalidInput("inertia coefficients must be finite".into()));
        }
        let n = reference.len();
        let mut kernels = Vec::with_capacity(elements.len());
        for (e, (&[a, b], &len)) in elements.iter().zip(lengths).enumerate() {
            if a >= n || b >= n || a == b {
                return Err(Error::InvalidInput(format!(
                    "element {e} has invalid connectivity ({a}, {b}) for {n} nodes"
                )));
            }
            if !(len > 0.0 && len.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "element {e} has non-positive length {len}"
                )));
            }
            let q_ref = gather_nodes(&reference.nodes[a], &reference.nodes[b]);
            kernels.push(ElementKernel::new(len, &q_ref));
        }
        Ok(Self {
            reference,
            elements,
            kernels,
            inertia,
        })
    }

    /// Quarter of a circle of radius `radius` discretized by `n_elements`
    /// equal elements. The first node sits at the origin, the center at
    /// `(radius, 0, 0)` (before the plane mapping), `d₃` is the unit tangent,
    /// `d₂` the inward normal and `d₁ = d₂ × d₃` the out-of-plane normal.
    pub fn quarter_arc(radius: f64, n_elements: usize, plane: Plane, inertia: Inertia) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) || n_elements == 0 {
            return Err(Error::InvalidInput(format!(
                "quarter arc needs radius > 0 and at least one element (got {radius}, {n_elements})"
            )));
        }
        let dtheta = std::f64::consts::FRAC_PI_2 / n_elements as f64;
        let nodes = (0..=n_elements)
            .map(|k| {
                let th = k as f64 * dtheta;
                let (s, c) = th.sin_cos();
                let phi = Vector3::new(radius * (1.0 - c), radius * s, 0.0);
                let d3 = Vector3::new(s, c, 0.0);
                let d2 = Vector3::new(c, -s, 0.0);
                let d1 = d2.cross(&d3);
                NodeState::new(plane.map(phi), plane.map(d1), plane.map(d2), plane.map(d3))
            })
            .collect();
        let lengths = vec![radius * dtheta; n_elements];
        Self::new(Configuration::new(nodes), chain(n_elements), &lengths, inertia)
    }

    /// Straight beam along `+z` from the origin with the canonical triad.
    pub fn straight(length: f64, n_elements: usize, inertia: Inertia) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) || n_elements == 0 {
            return Err(Error::InvalidInput(format!(
                "straight beam needs length > 0 and at least one element (got {length}, {n_elements})"
            )));
        }
        let h = length / n_elements as f64;
        let nodes = (0..=n_elements)
            .map(|k| NodeState::canonical(Vector3::new(0.0, 0.0, k as f64 * h)))
            .collect();
        Self::new(Configuration::new(nodes), chain(n_elements), &vec![h; n_elements], inertia)
    }

    pub fn reference(&self) -> &Configuration {
        &self.reference
    }

    pub fn n_nodes(&self) -> usize {
        self.reference.len()
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn n_dof(&self) -> usize {
        NODE_DOF * self.n_nodes()
    }

    pub fn elements(&self) -> &[[usize; 2]] {
        &self.elements
    }

    pub fn kernel(&self, e: usize) -> &ElementKernel {
        &self.kernels[e]
    }

    pub fn length(&self, e: usize) -> f64 {
        self.kernels[e].length()
    }

    pub fn total_length(&self) -> f64 {
        self.kernels.iter().map(|k| k.length()).sum()
    }

    pub fn inertia(&self) -> &Inertia {
        &self.inertia
    }

    /// Element coordinates `(q_a, q_b)` gathered from a flat vector.
    pub fn element_q(&self, q: &DVector<f64>, e: usize) -> Vec24 {
        let [a, b] = self.elements[e];
        let mut out = Vec24::zeros();
        out.as_mut_slice()[..NODE_DOF].copy_from_slice(node_slice(q, a));
        out.as_mut_slice()[NODE_DOF..].copy_from_slice(node_slice(q, b));
        out
    }

    /// Adds a 24-vector of element contributions into a flat nodal vector.
    pub fn scatter(&self, e: usize, local: &Vec24, out: &mut DVector<f64>) {
        let [a, b] = self.elements[e];
        for i in 0..NODE_DOF {
            out[NODE_DOF * a + i] += local[i];
            out[NODE_DOF * b + i] += local[NODE_DOF + i];
        }
    }

    /// Stacked element strains `e(q)` (6 per element).
    pub fn strains(&self, q: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(STRAIN_DIM * self.n_elements());
        for e in 0..self.n_elements() {
            let ee = self.kernels[e].strain(&self.element_q(q, e));
            out.rows_mut(STRAIN_DIM * e, STRAIN_DIM).copy_from(&ee);
        }
        out
    }

    /// Internal force `Σₑ Lₑ Bₑ(q)ᵀ sₑ` (one-point quadrature of `∫ s·δe dσ`).
    pub fn internal_force(&self, q: &DVector<f64>, s: &DVector<f64>) -> DVector<f64> {
        self.assemble_bt(q, s, true)
    }

    /// Unweighted `Σₑ Bₑ(q)ᵀ vₑ`.
    pub fn strain_jacobian_t(&self, q: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        self.assemble_bt(q, v, false)
    }

    fn assemble_bt(&self, q: &DVector<f64>, v: &DVector<f64>, weighted: bool) -> DVector<f64> {
        let mut out = DVector::zeros(self.n_dof());
        for e in 0..self.n_elements() {
            let b = self.kernels[e].strain_jacobian(&self.element_q(q, e));
            let w = if weighted { self.length(e) } else { 1.0 };
            self.scatter(e, &(b.transpose() * element_stress(v, e) * w), &mut out);
        }
        out
    }

    /// Consistent element mass `L_e [⅓ M̄, ⅙ M̄; ⅙ M̄, ⅓ M̄]`.
    pub fn element_mass(&self, e: usize) -> Mat24 {
        let mbar = self.inertia.mass_per_length();
        let l = self.length(e);
        let mut m = Mat24::zeros();
        for (i, j, w) in [(0, 0, 1.0 / 3.0), (0, 1, 1.0 / 6.0), (1, 0, 1.0 / 6.0), (1, 1, 1.0 / 3.0)] {
            m.fixed_view_mut::<NODE_DOF, NODE_DOF>(NODE_DOF * i, NODE_DOF * j)
                .copy_from(&(mbar * (l * w)));
        }
        m
    }

    pub fn mass_matrix(&self) -> DMatrix<f64> {
        let n = self.n_dof();
        let mut m = DMatrix::zeros(n, n);
        for (e, &[a, b]) in self.elements.iter().enumerate() {
            let me = self.element_mass(e);
            for (i, ni) in [a, b].into_iter().enumerate() {
                for (j, nj) in [a, b].into_iter().enumerate() {
                    let blk = me.fixed_view::<NODE_DOF, NODE_DOF>(NODE_DOF * i, NODE_DOF * j);
                    let mut target = m.view_mut((NODE_DOF * ni, NODE_DOF * nj), (NODE_DOF, NODE_DOF));
                    target += blk;
                }
            }
        }
        m
    }

    /// `M v` without forming the assembled matrix.
    pub fn apply_mass(&self, v: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.n_dof());
        for e in 0..self.n_elements() {
            let local = self.element_mass(e) * self.element_q(v, e);
            self.scatter(e, &local, &mut out);
        }
        out
    }

    /// `‖g‖∞` of a flat configuration.
    pub fn constraint_violation(&self, q: &DVector<f64>) -> f64 {
        let nodes: Vec<NodeState> = (0..self.n_nodes())
            .map(|a| NodeState::from_slice(node_slice(q, a)))
            .collect();
        max_violation(&nodes)
    }
}

/// Stress (or strain) 6-vector of element `e` from a stacked vector.
pub fn element_stress(s: &DVector<f64>, e: usize) -> Vec6 {
    Vec6::from_column_slice(&s.as_slice()[STRAIN_DIM * e..STRAIN_DIM * (e + 1)])
}

fn chain(n_elements: usize) -> Vec<[usize; 2]> {
    (0..n_elements).map(|e| [e, e + 1]).collect()
}

fn gather_nodes(a: &NodeState, b: &NodeState) -> Vec24 {
    let mut q = Vec24::zeros();
    a.write_to(&mut q.as_mut_slice()[..NODE_DOF]);
    b.write_to(&mut q.as_mut_slice()[NODE_DOF..ELEM_DOF]);
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beam::config::{D3, PHI};

    fn benchmark_inertia() -> Inertia {
        Inertia::principal(10.0, 20.0, 20.0)
    }

    #[test]
    fn single_element_mass_entries() {
        let mesh = BeamMesh::straight(1.0, 1, benchmark_inertia()).unwrap();
        let m = mesh.mass_matrix();
        assert!((m[(PHI, PHI)] - 10.0 / 3.0).abs() < 1e-15);
        assert!((m[(PHI, NODE_DOF + PHI)] - 10.0 / 6.0).abs() < 1e-15);
        assert_eq!(m, m.transpose());
    }

    #[test]
    fn arc_mesh_total_translational_mass() {
        let r = 2.0 / std::f64::consts::PI;
        let mesh = BeamMesh::quarter_arc(r, 20, Plane::Xy, benchmark_inertia()).unwrap();
        assert!((mesh.total_length() - 1.0).abs() < 1e-14);
        let m = mesh.mass_matrix();
        let mut total = 0.0;
        for a in 0..mesh.n_nodes() {
            for b in 0..mesh.n_nodes() {
                total += m[(NODE_DOF * a, NODE_DOF * b)];
            }
        }
        assert!((total - 10.0).abs() < 1e-12);
        for a in 0..mesh.n_nodes() {
            for i in 0..3 {
                assert!(m.row(NODE_DOF * a + D3 + i).iter().all(|v| *v == 0.0));
            }
        }
    }

    #[test]
    fn arc_reference_is_feasible_and_stress_free() {
        let r = 2.0 / std::f64::consts::PI;
        for plane in [Plane::Xy, Plane::Yz, Plane::Zx] {
            let mesh = BeamMesh::quarter_arc(r, 20, plane, benchmark_inertia()).unwrap();
            let q0 = mesh.reference().to_flat();
            assert!(mesh.constraint_violation(&q0) <= 1e-14);
            assert!(mesh.strains(&q0).amax() == 0.0);
            for node in &mesh.reference().nodes {
                assert!((node.rotation().determinant() - 1.0).abs() < 1e-14);
            }
        }
        let mesh = BeamMesh::quarter_arc(r, 20, Plane::Xy, benchmark_inertia()).unwrap();
        let last = mesh.reference().nodes[20].phi0;
        assert!((last - Vector3::new(r, r, 0.0)).amax() < 1e-15);
    }

    #[test]
    fn apply_mass_matches_assembled_matrix() {
        let r = 2.0 / std::f64::consts::PI;
        let mesh = BeamMesh::quarter_arc(r, 5, Plane::Xy, Inertia { e01: 0.3, e12: -0.1, ..benchmark_inertia() }).unwrap();
        let v = DVector::from_fn(mesh.n_dof(), |i, _| (0.37 * i as f64).cos());
        assert!((mesh.apply_mass(&v) - mesh.mass_matrix() * &v).amax() < 1e-13);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(BeamMesh::quarter_arc(0.0, 20, Plane::Xy, benchmark_inertia()).is_err());
        assert!(BeamMesh::straight(1.0, 0, benchmark_inertia()).is_err());
        let cfg = Configuration::new(vec![NodeState::canonical(Vector3::zeros()); 2]);
        assert!(BeamMesh::new(cfg.clone(), vec![[0, 1]], &[0.0], benchmark_inertia()).is_err());
        assert!(BeamMesh::new(cfg, vec![[0, 2]], &[1.0], benchmark_inertia()).is_err());
    }
}
