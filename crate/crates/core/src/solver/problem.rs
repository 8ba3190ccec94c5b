use nalgebra::{DMatrix, DVector, SMatrix};

use crate::beam::constraint::{nullspace_basis, Mat12x6, REDUCED_DIM};
use crate::beam::{element_stress, BeamMesh, NodeState, NODE_DOF, STRAIN_DIM};
use crate::constitutive::Mat6;
use crate::error::{Error, Result};

/// Symmetric positive definite 6×6 weight `C` and its inverse, shared by all
/// elements. The cost of element `e` uses `L_e C` and `L_e C⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightMatrix {
    c: Mat6,
    c_inv: Mat6,
}

impl WeightMatrix {
    pub fn new(c: Mat6) -> Result<Self> {
        if (c - c.transpose()).amax() > 1e-14 * c.amax() {
            return Err(Error::InvalidInput("weight matrix must be symmetric".into()));
        }
        let chol = c
            .cholesky()
            .ok_or_else(|| Error::InvalidInput("weight matrix must be positive definite".into()))?;
        Ok(Self {
            c,
            c_inv: chol.inverse(),
        })
    }

    pub fn identity() -> Self {
        Self {
            c: Mat6::identity(),
            c_inv: Mat6::identity(),
        }
    }

    pub fn diagonal(d: &[f64; 6]) -> Result<Self> {
        Self::new(Mat6::from_diagonal(&nalgebra::Vector6::from_column_slice(d)))
    }

    /// Unchecked pair; used to probe the solver with degenerate weights.
    pub fn from_raw(c: Mat6, c_inv: Mat6) -> Self {
        Self { c, c_inv }
    }

    pub fn c(&self) -> &Mat6 {
        &self.c
    }

    pub fn c_inv(&self) -> &Mat6 {
        &self.c_inv
    }
}

impl Default for WeightMatrix {
    fn default() -> Self {
        Self::identity()
    }
}

/// Frozen data of one time step `[t_i, t_{i+1}]`.
#[derive(Debug, Clone)]
pub struct StepProblem<'a> {
    mesh: &'a BeamMesh,
    q_prev: DVector<f64>,
    q_curr: DVector<f64>,
    s_prev: DVector<f64>,
    f_prev: DVector<f64>,
    f_next: DVector<f64>,
    dt: f64,
    weights: WeightMatrix,
    /// `N(q_i)` per node.
    basis: Vec<Mat12x6>,
    /// Known part of the unprojected balance, see [`StepProblem::balance_full`].
    known: DVector<f64>,
}

/// Element block `[N_aᵀ K_a·; N_bᵀ K_b·]` of `F`.
pub(crate) type FBlock = SMatrix<f64, 12, 24>;

impl<'a> StepProblem<'a> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        mesh: &'a BeamMesh,
        q_prev: DVector<f64>,
        q_curr: DVector<f64>,
        s_prev: DVector<f64>,
        f_prev: DVector<f64>,
        f_next: DVector<f64>,
        dt: f64,
        weights: WeightMatrix,
    ) -> Result<Self> {
        let nq = mesh.n_dof();
        let ns = STRAIN_DIM * mesh.n_elements();
        for (what, v, n) in [
            ("q_{i-1}", &q_prev, nq),
            ("q_i", &q_curr, nq),
            ("s_{i-1/2}", &s_prev, ns),
            ("f_{i-1/2}", &f_prev, nq),
            ("f_{i+1/2}", &f_next, nq),
        ] {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    what,
                    expected: n,
                    got: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite(what));
            }
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidInput(format!("time step {dt} must be positive")));
        }
        let basis = (0..mesh.n_nodes())
            .map(|a| nullspace_basis(&NodeState::from_slice(crate::beam::config::node_slice(&q_curr, a))))
            .collect();
        let q_mid_prev = (&q_prev + &q_curr) * 0.5;
        let known = mesh.apply_mass(&(&q_curr - &q_prev)) / dt - mesh.internal_force(&q_mid_prev, &s_prev) * (0.5 * dt)
            + (&f_prev + &f_next) * (0.5 * dt);
        Ok(Self {
            mesh,
            q_prev,
            q_curr,
            s_prev,
            f_prev,
            f_next,
            dt,
            weights,
            basis,
            known,
        })
    }

    pub fn mesh(&self) -> &'a BeamMesh {
        self.mesh
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn weights(&self) -> &WeightMatrix {
        &self.weights
    }

    pub fn q_prev(&self) -> &DVector<f64> {
        &self.q_prev
    }

    pub fn q_curr(&self) -> &DVector<f64> {
        &self.q_curr
    }

    pub fn s_prev(&self) -> &DVector<f64> {
        &self.s_prev
    }

    pub fn f_prev(&self) -> &DVector<f64> {
        &self.f_prev
    }

    pub fn f_next(&self) -> &DVector<f64> {
        &self.f_next
    }

    /// `N(q_i)` at node `a`.
    pub fn basis(&self, a: usize) -> &Mat12x6 {
        &self.basis[a]
    }

    /// `(L_e C, L_e C⁻¹)`.
    pub fn element_weights(&self, e: usize) -> (Mat6, Mat6) {
        let l = self.mesh.length(e);
        (self.weights.c * l, self.weights.c_inv * l)
    }

    /// `q_{i+1/2} = (q_i + q_{i+1}) / 2`.
    pub fn midpoint(&self, q_next: &DVector<f64>) -> DVector<f64> {
        (&self.q_curr + q_next) * 0.5
    }

    /// Unprojected balance `M(q_{i+1}−2q_i+q_{i−1})/Δt + (Δt/2)(B_{i−1/2}ᵀs_{i−1/2}
    /// + B_{i+1/2}ᵀs_{i+1/2}) − (Δt/2)(f_{i−1/2}+f_{i+1/2})`.
    pub fn balance_full(&self, q_next: &DVector<f64>, s_next: &DVector<f64>) -> DVector<f64> {
        let inertia = self.mesh.apply_mass(&(q_next - &self.q_curr)) / self.dt;
        let stress = self.mesh.internal_force(&self.midpoint(q_next), s_next) * (0.5 * self.dt);
        inertia + stress - &self.known
    }

    /// Null-space projection `N(q_i)ᵀ r` node by node.
    pub fn project(&self, r: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(REDUCED_DIM * self.mesh.n_nodes());
        for (a, n) in self.basis.iter().enumerate() {
            let ra = r.fixed_rows::<NODE_DOF>(NODE_DOF * a);
            out.fixed_rows_mut::<REDUCED_DIM>(REDUCED_DIM * a)
                .copy_from(&(n.transpose() * ra));
        }
        out
    }

    /// Reduced balance residual `f(q_{i+1}, s_{i+1/2})`.
    pub fn reduced_balance_residual(&self, q_next: &DVector<f64>, s_next: &DVector<f64>) -> DVector<f64> {
        self.project(&self.balance_full(q_next, s_next))
    }

    /// Element block of `F` with separate scales on the mass and stress parts.
    pub(crate) fn f_block(&self, e: usize, s_next: &DVector<f64>, mass_scale: f64, stress_scale: f64) -> FBlock {
        let kernel = self.mesh.kernel(e);
        let mut k = self.mesh.element_mass(e) * (mass_scale / self.dt);
        if stress_scale != 0.0 {
            k += kernel.strain_hessian_t(&element_stress(s_next, e)) * (stress_scale * 0.25 * self.dt * kernel.length());
        }
        let [a, b] = self.mesh.elements()[e];
        let mut out = FBlock::zeros();
        out.fixed_rows_mut::<6>(0)
            .copy_from(&(self.basis[a].transpose() * k.fixed_rows::<NODE_DOF>(0)));
        out.fixed_rows_mut::<6>(6)
            .copy_from(&(self.basis[b].transpose() * k.fixed_rows::<NODE_DOF>(NODE_DOF)));
        out
    }

    fn assemble_f(&self, s_next: &DVector<f64>, mass_scale: f64, stress_scale: f64) -> DMatrix<f64> {
        let mut f = DMatrix::zeros(REDUCED_DIM * self.mesh.n_nodes(), self.mesh.n_dof());
        for e in 0..self.mesh.n_elements() {
            let blk = self.f_block(e, s_next, mass_scale, stress_scale);
            let nodes = self.mesh.elements()[e];
            for (i, ni) in nodes.iter().enumerate() {
                for (j, nj) in nodes.iter().enumerate() {
                    let mut target = f.view_mut((REDUCED_DIM * ni, NODE_DOF * nj), (REDUCED_DIM, NODE_DOF));
                    target += blk.fixed_view::<6, NODE_DOF>(6 * i, NODE_DOF * j);
                }
            }
        }
        f
    }

    /// `F = ∂f/∂q_{i+1} = N(q_i)ᵀ(M/Δt + (Δt/4) Σₑ Lₑ U₂(sₑ))`.
    pub fn balance_jacobian(&self, s_next: &DVector<f64>) -> DMatrix<f64> {
        self.assemble_f(s_next, 1.0, 1.0)
    }

    /// The mass addend `N(q_i)ᵀM/Δt` and the stress addend of `F` separately.
    pub fn balance_jacobian_parts(&self, s_next: &DVector<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
        (self.assemble_f(s_next, 1.0, 0.0), self.assemble_f(s_next, 0.0, 1.0))
    }
}
