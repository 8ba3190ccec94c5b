//! First-order optimality conditions of the step problems and their
//! symmetric indefinite Jacobians.
//!
//! fixNLP Lagrangian (per element weights `W = L_e C`, `W* = L_e C⁻¹`):
//!
//! ```text
//! Σ_e ½|e − ẽ|²_W + ½|s − s̃|²_W* + λᵀ(e − e(q_{i+1/2})) + μᵀ f(q_{i+1}, s) + νᵀ g(q_{i+1})
//! ```
//!
//! The approximate NLP adds `(ě, š)` in place of `(ẽ, s̃)` together with the
//! manifold constraint `ξᵀ h(ě, š)`.

use nalgebra::{DVector, Dyn, Matrix, RawStorage, U1};

use super::problem::StepProblem;
use super::state::{Formulation, Layout, PrimalDualState};
use crate::beam::config::node_slice;
use crate::beam::{
    constraint_curvature, constraint_jacobian, constraints, Mat6x24, NodeState, Vec6, CONSTRAINT_DIM, NODE_DOF,
    REDUCED_DIM, STRAIN_DIM,
};
use crate::constitutive::{DataPoint, Manifold, Mat6};
use crate::error::{Error, Result};
use crate::linalg::Triplets;

fn check(problem: &StepProblem, state: &PrimalDualState, form: &Formulation) -> Result<Layout> {
    let mesh = problem.mesh();
    state.check_dimensions(mesh)?;
    if let Formulation::Fix(points) = form {
        if points.len() != mesh.n_elements() {
            return Err(Error::DimensionMismatch {
                what: "data points per element",
                expected: mesh.n_elements(),
                got: points.len(),
            });
        }
    }
    Ok(Layout::new(mesh, form.is_approx()))
}

fn node(q: &DVector<f64>, a: usize) -> NodeState {
    NodeState::from_slice(node_slice(q, a))
}

fn seg<S: RawStorage<f64, Dyn, U1>>(v: &Matrix<f64, Dyn, U1, S>, e: usize) -> Vec6 {
    Vec6::from_fn(|i, _| v[STRAIN_DIM * e + i])
}

fn put(r: &mut DVector<f64>, offset: usize, v: &Vec6) {
    r.fixed_rows_mut::<STRAIN_DIM>(offset).copy_from(v);
}

/// `N(q_i) μ` as a nodal vector.
fn null_image(problem: &StepProblem, mu: &DVector<f64>) -> DVector<f64> {
    let n_nodes = problem.mesh().n_nodes();
    let mut a = DVector::zeros(NODE_DOF * n_nodes);
    for k in 0..n_nodes {
        let img = problem.basis(k) * mu.fixed_rows::<REDUCED_DIM>(REDUCED_DIM * k);
        a.fixed_rows_mut::<NODE_DOF>(NODE_DOF * k).copy_from(&img);
    }
    a
}

/// Data point per element: fixed for fixNLP, `(ě, š)` for the approximate NLP.
fn targets(state: &PrimalDualState, form: &Formulation, e: usize) -> (Vec6, Vec6) {
    match form {
        Formulation::Fix(points) => (points[e].strain, points[e].stress),
        Formulation::Approx(_) => (seg(&state.e_check, e), seg(&state.s_check, e)),
    }
}

/// Stacked KKT residual in the natural order of [`Layout`].
pub fn kkt_residual(problem: &StepProblem, state: &PrimalDualState, form: Formulation) -> Result<DVector<f64>> {
    let l = check(problem, state, &form)?;
    let mesh = problem.mesh();
    let dt = problem.dt();
    let q_mid = problem.midpoint(&state.q);
    let image = null_image(problem, &state.mu);
    let mut r = DVector::zeros(l.len);

    // δq = −½ Bᵀλ + Fᵀμ + Gᵀν, with Fᵀμ = M Nμ/Δt + (Δt/4) L U₂(s) Nμ.
    let mut rq = mesh.apply_mass(&image) / dt + mesh.internal_force(&image, &state.s) * (0.25 * dt)
        - mesh.strain_jacobian_t(&q_mid, &state.lambda) * 0.5;
    for a in 0..mesh.n_nodes() {
        let g = constraint_jacobian(&node(&state.q, a));
        let nu = state.nu.fixed_rows::<CONSTRAINT_DIM>(CONSTRAINT_DIM * a);
        let mut blk = rq.fixed_rows_mut::<NODE_DOF>(NODE_DOF * a);
        blk += g.transpose() * nu;
    }
    r.rows_mut(l.q, rq.len()).copy_from(&rq);

    for e in 0..mesh.n_elements() {
        let kernel = mesh.kernel(e);
        let qm = mesh.element_q(&q_mid, e);
        let b = kernel.strain_jacobian(&qm);
        let len = mesh.length(e);
        let (w, w_inv) = problem.element_weights(e);
        let (ee, se, lam) = (seg(&state.e, e), seg(&state.s, e), seg(&state.lambda, e));
        let (et, st) = targets(state, &form, e);
        let k = STRAIN_DIM * e;
        put(&mut r, l.e + k, &(w * (ee - et) + lam));
        put(&mut r, l.s + k, &(w_inv * (se - st) + b * mesh.element_q(&image, e) * (0.5 * dt * len)));
        put(&mut r, l.lambda + k, &(ee - kernel.strain(&qm)));
        if let Formulation::Approx(law) = form {
            let (ec, sc, xi) = (seg(&state.e_check, e), seg(&state.s_check, e), seg(&state.xi, e));
            let (he, hs) = law.derivatives(&ec, &sc);
            put(&mut r, l.e_check + k, &(w * (ec - ee) + he.transpose() * xi));
            put(&mut r, l.s_check + k, &(w_inv * (sc - se) + hs.transpose() * xi));
            put(&mut r, l.xi + k, &law.residual(&ec, &sc));
        }
    }

    let f = problem.reduced_balance_residual(&state.q, &state.s);
    r.rows_mut(l.mu, f.len()).copy_from(&f);
    for a in 0..mesh.n_nodes() {
        r.fixed_rows_mut::<CONSTRAINT_DIM>(l.nu + CONSTRAINT_DIM * a)
            .copy_from(&constraints(&node(&state.q, a)));
    }
    Ok(r)
}

/// Symmetric KKT matrix in the natural order of [`Layout`].
pub fn kkt_matrix(problem: &StepProblem, state: &PrimalDualState, form: Formulation) -> Result<Triplets> {
    let l = check(problem, state, &form)?;
    let mesh = problem.mesh();
    let dt = problem.dt();
    let q_mid = problem.midpoint(&state.q);
    let image = null_image(problem, &state.mu);
    let mut t = Triplets::with_capacity(l.len, 2000 * mesh.n_elements());
    let id6 = Mat6::identity();

    for e in 0..mesh.n_elements() {
        let kernel = mesh.kernel(e);
        let [na, nb] = mesh.elements()[e];
        let qcols = [l.q + NODE_DOF * na, l.q + NODE_DOF * nb];
        let mucols = [l.mu + REDUCED_DIM * na, l.mu + REDUCED_DIM * nb];
        let k = STRAIN_DIM * e;
        let (re, rs, rl) = (l.e + k, l.s + k, l.lambda + k);

        let b = kernel.strain_jacobian(&mesh.element_q(&q_mid, e));
        let u2 = kernel.strain_hessian_t(&seg(&state.lambda, e)) * -0.25;
        let len = mesh.length(e);
        let u1: Mat6x24 = kernel.strain_hessian(&mesh.element_q(&image, e)) * (0.25 * dt * len);
        let (w, w_inv) = problem.element_weights(e);

        for i in 0..2 {
            for j in 0..2 {
                t.add_block(
                    qcols[i],
                    qcols[j],
                    &u2.fixed_view::<NODE_DOF, NODE_DOF>(NODE_DOF * i, NODE_DOF * j),
                    1.0,
                );
            }
            let cols = NODE_DOF * i;
            // (s, q) and (λ, q) rows with their mirrors.
            t.add_block_sym(rs, qcols[i], &u1.fixed_view::<STRAIN_DIM, NODE_DOF>(0, cols), 1.0);
            t.add_block_sym(rl, qcols[i], &b.fixed_view::<STRAIN_DIM, NODE_DOF>(0, cols), -0.5);
            // (s, μ) = (Δt/2) L B N
            let nodes = [na, nb];
            let bn = b.fixed_view::<STRAIN_DIM, NODE_DOF>(0, cols) * problem.basis(nodes[i]);
            t.add_block_sym(rs, mucols[i], &bn, 0.5 * dt * len);
        }
        t.add_block(re, re, &w, 1.0);
        t.add_block(rs, rs, &w_inv, 1.0);
        t.add_block_sym(re, rl, &id6, 1.0);

        // (μ, q) = F and its mirror.
        let fb = problem.f_block(e, &state.s, 1.0, 1.0);
        for i in 0..2 {
            for j in 0..2 {
                t.add_block_sym(
                    mucols[i],
                    qcols[j],
                    &fb.fixed_view::<REDUCED_DIM, NODE_DOF>(REDUCED_DIM * i, NODE_DOF * j),
                    1.0,
                );
            }
        }

        if let Formulation::Approx(law) = form {
            let (rec, rsc, rxi) = (l.e_check + k, l.s_check + k, l.xi + k);
            let (ec, sc, xi) = (seg(&state.e_check, e), seg(&state.s_check, e), seg(&state.xi, e));
            let (he, hs) = law.derivatives(&ec, &sc);
            let curv = law.curvature(&ec, &sc, &xi);
            t.add_block(rec, rec, &(w + curv.ee), 1.0);
            t.add_block(rsc, rsc, &(w_inv + curv.ss), 1.0);
            t.add_block_sym(rec, rsc, &curv.es, 1.0);
            t.add_block_sym(rec, re, &w, -1.0);
            t.add_block_sym(rsc, rs, &w_inv, -1.0);
            t.add_block_sym(rxi, rec, &he, 1.0);
            t.add_block_sym(rxi, rsc, &hs, 1.0);
        }
    }

    for a in 0..mesh.n_nodes() {
        let nd = node(&state.q, a);
        let rq = l.q + NODE_DOF * a;
        let nu = state.nu.fixed_rows::<CONSTRAINT_DIM>(CONSTRAINT_DIM * a).into_owned();
        t.add_block(rq, rq, &constraint_curvature(&nu), 1.0);
        t.add_block_sym(l.nu + CONSTRAINT_DIM * a, rq, &constraint_jacobian(&nd), 1.0);
    }
    Ok(t)
}

pub fn kkt_residual_fix(problem: &StepProblem, state: &PrimalDualState, data: &[DataPoint]) -> Result<DVector<f64>> {
    kkt_residual(problem, state, Formulation::Fix(data))
}

pub fn kkt_matrix_fix(problem: &StepProblem, state: &PrimalDualState) -> Result<Triplets> {
    let zeros = vec![DataPoint::new(Vec6::zeros(), Vec6::zeros()); problem.mesh().n_elements()];
    kkt_matrix(problem, state, Formulation::Fix(&zeros))
}

pub fn kkt_residual_approx(
    problem: &StepProblem,
    state: &PrimalDualState,
    law: &dyn Manifold,
) -> Result<DVector<f64>> {
    kkt_residual(problem, state, Formulation::Approx(law))
}

pub fn kkt_matrix_approx(problem: &StepProblem, state: &PrimalDualState, law: &dyn Manifold) -> Result<Triplets> {
    kkt_matrix(problem, state, Formulation::Approx(law))
}
