use nalgebra::DVector;

use crate::beam::{BeamMesh, CONSTRAINT_DIM, NODE_DOF, REDUCED_DIM, STRAIN_DIM};
use crate::constitutive::{DataPoint, Manifold};
use crate::error::{Error, Result};

/// Which step problem is solved.
#[derive(Clone, Copy)]
pub enum Formulation<'a> {
    /// fixNLP with one fixed data point per element.
    Fix(&'a [DataPoint]),
    /// Approximate NLP over a smooth constitutive manifold.
    Approx(&'a dyn Manifold),
}

impl Formulation<'_> {
    pub fn is_approx(&self) -> bool {
        matches!(self, Formulation::Approx(_))
    }
}

impl std::fmt::Debug for Formulation<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Formulation::Fix(points) => write!(f, "Fix({} points)", points.len()),
            Formulation::Approx(_) => write!(f, "Approx"),
        }
    }
}

/// Primal and dual unknowns of one step. `e_check`, `s_check` and `xi` are
/// used only by the approximate NLP.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimalDualState {
    pub q: DVector<f64>,
    pub e: DVector<f64>,
    pub s: DVector<f64>,
    pub lambda: DVector<f64>,
    pub mu: DVector<f64>,
    pub nu: DVector<f64>,
    pub e_check: DVector<f64>,
    pub s_check: DVector<f64>,
    pub xi: DVector<f64>,
}

impl PrimalDualState {
    /// Configuration `q`, everything else zero.
    pub fn at_rest(mesh: &BeamMesh, q: DVector<f64>) -> Self {
        let ne = STRAIN_DIM * mesh.n_elements();
        let nn = REDUCED_DIM * mesh.n_nodes();
        Self {
            q,
            e: DVector::zeros(ne),
            s: DVector::zeros(ne),
            lambda: DVector::zeros(ne),
            mu: DVector::zeros(nn),
            nu: DVector::zeros(CONSTRAINT_DIM * mesh.n_nodes()),
            e_check: DVector::zeros(ne),
            s_check: DVector::zeros(ne),
            xi: DVector::zeros(ne),
        }
    }

    pub fn check_dimensions(&self, mesh: &BeamMesh) -> Result<()> {
        let ne = STRAIN_DIM * mesh.n_elements();
        let nn = REDUCED_DIM * mesh.n_nodes();
        for (what, v, n) in [
            ("q", &self.q, mesh.n_dof()),
            ("e", &self.e, ne),
            ("s", &self.s, ne),
            ("lambda", &self.lambda, ne),
            ("mu", &self.mu, nn),
            ("nu", &self.nu, CONSTRAINT_DIM * mesh.n_nodes()),
            ("e_check", &self.e_check, ne),
            ("s_check", &self.s_check, ne),
            ("xi", &self.xi, ne),
        ] {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    what,
                    expected: n,
                    got: v.len(),
                });
            }
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        [
            &self.q,
            &self.e,
            &self.s,
            &self.lambda,
            &self.mu,
            &self.nu,
            &self.e_check,
            &self.s_check,
            &self.xi,
        ]
        .iter()
        .all(|v| v.iter().all(|x| x.is_finite()))
    }
}

/// Offsets of the unknown blocks in the natural (block-stacked) order
/// `[ě, š,] q, e, s, λ, μ, ν [, ξ]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub n_nodes: usize,
    pub n_elements: usize,
    pub approx: bool,
    pub e_check: usize,
    pub s_check: usize,
    pub q: usize,
    pub e: usize,
    pub s: usize,
    pub lambda: usize,
    pub mu: usize,
    pub nu: usize,
    pub xi: usize,
    pub len: usize,
}

impl Layout {
    pub fn new(mesh: &BeamMesh, approx: bool) -> Self {
        let (nn, ne) = (mesh.n_nodes(), mesh.n_elements());
        let es = STRAIN_DIM * ne;
        let mut at = 0;
        let mut take = |n: usize| {
            let o = at;
            at += n;
            o
        };
        let (e_check, s_check) = if approx { (take(es), take(es)) } else { (0, 0) };
        let q = take(NODE_DOF * nn);
        let e = take(es);
        let s = take(es);
        let lambda = take(es);
        let mu = take(REDUCED_DIM * nn);
        let nu = take(CONSTRAINT_DIM * nn);
        let xi = if approx { take(es) } else { 0 };
        Self {
            n_nodes: nn,
            n_elements: ne,
            approx,
            e_check,
            s_check,
            q,
            e,
            s,
            lambda,
            mu,
            nu,
            xi,
            len: at,
        }
    }

    pub fn pack(&self, st: &PrimalDualState) -> DVector<f64> {
        let mut x = DVector::zeros(self.len);
        let mut put = |o: usize, v: &DVector<f64>| x.rows_mut(o, v.len()).copy_from(v);
        if self.approx {
            put(self.e_check, &st.e_check);
            put(self.s_check, &st.s_check);
            put(self.xi, &st.xi);
        }
        put(self.q, &st.q);
        put(self.e, &st.e);
        put(self.s, &st.s);
        put(self.lambda, &st.lambda);
        put(self.mu, &st.mu);
        put(self.nu, &st.nu);
        x
    }

    /// Writes the packed vector back; blocks absent from the layout keep
    /// their values in `st`.
    pub fn unpack_into(&self, x: &DVector<f64>, st: &mut PrimalDualState) {
        let get = |o: usize, v: &mut DVector<f64>| {
            let n = v.len();
            v.copy_from(&x.rows(o, n));
        };
        if self.approx {
            get(self.e_check, &mut st.e_check);
            get(self.s_check, &mut st.s_check);
            get(self.xi, &mut st.xi);
        }
        get(self.q, &mut st.q);
        get(self.e, &mut st.e);
        get(self.s, &mut st.s);
        get(self.lambda, &mut st.lambda);
        get(self.mu, &mut st.mu);
        get(self.nu, &mut st.nu);
    }

    /// `ordering[i]` is the position of natural unknown `i` when node blocks
    /// `(q, μ, ν)` and element blocks `(ě, š, e, s, λ, ξ)` are interleaved
    /// along the mesh. Each element follows the last of its nodes, which
    /// keeps the KKT matrix banded for chain-like meshes.
    pub fn ordering(&self, mesh: &BeamMesh) -> Vec<usize> {
        let mut ordering = vec![usize::MAX; self.len];
        let mut pos = 0;
        let mut place = |start: usize, n: usize, ordering: &mut Vec<usize>| {
            for i in 0..n {
                ordering[start + i] = pos;
                pos += 1;
            }
        };
        let mut by_last: Vec<Vec<usize>> = vec![Vec::new(); self.n_nodes];
        for (e, &[a, b]) in mesh.elements().iter().enumerate() {
            by_last[a.max(b)].push(e);
        }
        for (a, elements) in by_last.iter().enumerate() {
            place(self.q + NODE_DOF * a, NODE_DOF, &mut ordering);
            place(self.mu + REDUCED_DIM * a, REDUCED_DIM, &mut ordering);
            place(self.nu + CONSTRAINT_DIM * a, CONSTRAINT_DIM, &mut ordering);
            for &e in elements {
                let k = STRAIN_DIM * e;
                if self.approx {
                    place(self.e_check + k, STRAIN_DIM, &mut ordering);
                    place(self.s_check + k, STRAIN_DIM, &mut ordering);
                }
                place(self.e + k, STRAIN_DIM, &mut ordering);
                place(self.s + k, STRAIN_DIM, &mut ordering);
                place(self.lambda + k, STRAIN_DIM, &mut ordering);
                if self.approx {
                    place(self.xi + k, STRAIN_DIM, &mut ordering);
                }
            }
        }
        debug_assert!(ordering.iter().all(|&p| p < self.len));
        ordering
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beam::{Inertia, Plane};

    fn arc() -> BeamMesh {
        BeamMesh::quarter_arc(2.0 / std::f64::consts::PI, 20, Plane::Xy, Inertia::principal(10.0, 20.0, 20.0)).unwrap()
    }

    #[test]
    fn benchmark_dimensions() {
        let mesh = arc();
        let l = Layout::new(&mesh, true);
        assert_eq!(mesh.n_dof(), 252);
        assert_eq!(l.e - l.q, 252);
        assert_eq!(l.s - l.e, 120);
        assert_eq!(l.nu - l.mu, 126);
        assert_eq!(l.len, 1224);
        assert_eq!(Layout::new(&mesh, false).len, 1224 - 360);
        // rows(μ) + rows(ν) = dim q
        assert_eq!(l.xi - l.mu, mesh.n_dof());
    }

    #[test]
    fn ordering_is_a_permutation() {
        let mesh = arc();
        for approx in [false, true] {
            let l = Layout::new(&mesh, approx);
            let mut o = l.ordering(&mesh);
            o.sort_unstable();
            assert!(o.iter().enumerate().all(|(i, &p)| i == p));
        }
    }

    #[test]
    fn pack_unpack_round_trip() {
        let mesh = arc();
        let mut st = PrimalDualState::at_rest(&mesh, mesh.reference().to_flat());
        st.xi[3] = 2.0;
        st.mu[7] = -1.0;
        let l = Layout::new(&mesh, true);
        let x = l.pack(&st);
        let mut back = PrimalDualState::at_rest(&mesh, DVector::zeros(252));
        l.unpack_into(&x, &mut back);
        assert_eq!(back, st);
    }
}
