use nalgebra::{DVector, Matrix3, Vector3};

use crate::error::{Error, Result};

/// Scalars per node: position followed by the three directors.
pub const NODE_DOF: usize = 12;
pub const PHI: usize = 0;
pub const D1: usize = 3;
pub const D2: usize = 6;
pub const D3: usize = 9;

/// Nodal state of the director beam: axis position and cross-section triad.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeState {
    pub phi0: Vector3<f64>,
    pub d1: Vector3<f64>,
    pub d2: Vector3<f64>,
    pub d3: Vector3<f64>,
}

impl NodeState {
    pub fn new(phi0: Vector3<f64>, d1: Vector3<f64>, d2: Vector3<f64>, d3: Vector3<f64>) -> Self {
        Self { phi0, d1, d2, d3 }
    }

    /// Node at `phi0` with the canonical triad.
    pub fn canonical(phi0: Vector3<f64>) -> Self {
        Self::new(phi0, Vector3::x(), Vector3::y(), Vector3::z())
    }

    pub fn directors(&self) -> [Vector3<f64>; 3] {
        [self.d1, self.d2, self.d3]
    }

    /// Rotation tensor `Λ = Σ d_k ⊗ i^k` (directors as columns).
    pub fn rotation(&self) -> Matrix3<f64> {
        Matrix3::from_columns(&[self.d1, self.d2, self.d3])
    }

    pub fn from_slice(q: &[f64]) -> Self {
        let v = |o: usize| Vector3::new(q[o], q[o + 1], q[o + 2]);
        Self::new(v(PHI), v(D1), v(D2), v(D3))
    }

    pub fn write_to(&self, q: &mut [f64]) {
        for (o, v) in [(PHI, &self.phi0), (D1, &self.d1), (D2, &self.d2), (D3, &self.d3)] {
            q[o..o + 3].copy_from_slice(v.as_slice());
        }
    }

    /// Applies `x ↦ R x + t` to the position and `d ↦ R d` to the directors.
    pub fn transformed(&self, r: &Matrix3<f64>, t: &Vector3<f64>) -> Self {
        Self::new(r * self.phi0 + t, r * self.d1, r * self.d2, r * self.d3)
    }
}

/// Generalized coordinates of all nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    pub nodes: Vec<NodeState>,
}

impl Configuration {
    pub fn new(nodes: Vec<NodeState>) -> Self {
        Self { nodes }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn to_flat(&self) -> DVector<f64> {
        let mut q = DVector::zeros(NODE_DOF * self.nodes.len());
        for (a, node) in self.nodes.iter().enumerate() {
            node.write_to(&mut q.as_mut_slice()[NODE_DOF * a..NODE_DOF * (a + 1)]);
        }
        q
    }

    pub fn from_flat(q: &DVector<f64>) -> Result<Self> {
        if q.len() % NODE_DOF != 0 {
            return Err(Error::InvalidInput(format!(
                "flat configuration length {} is not a multiple of {NODE_DOF}",
                q.len()
            )));
        }
        Ok(Self::new(
            q.as_slice()
                .chunks_exact(NODE_DOF)
                .map(NodeState::from_slice)
                .collect(),
        ))
    }
}

/// View of node `a` inside a flat coordinate vector.
pub fn node_slice(q: &DVector<f64>, a: usize) -> &[f64] {
    &q.as_slice()[NODE_DOF * a..NODE_DOF * (a + 1)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn flat_round_trip_is_exact(values in proptest::collection::vec(-1e3f64..1e3, 12..=60)) {
            let n = values.len() / NODE_DOF;
            let q = DVector::from_column_slice(&values[..n * NODE_DOF]);
            let cfg = Configuration::from_flat(&q).unwrap();
            prop_assert_eq!(cfg.len(), n);
            prop_assert_eq!(cfg.to_flat(), q);
        }
    }

    #[test]
    fn rejects_ragged_flat_vector() {
        assert!(Configuration::from_flat(&DVector::zeros(13)).is_err());
    }

    #[test]
    fn rotation_has_directors_as_columns() {
        let n = NodeState::canonical(Vector3::zeros());
        assert_eq!(n.rotation(), Matrix3::identity());
    }
}
