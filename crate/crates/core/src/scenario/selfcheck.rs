//! Finite-difference and oracle checks of every analytic operator, runnable
//! from the command line on any build.

use nalgebra::{DVector, Matrix3, SVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::beam::{
    constraint_curvature, constraint_jacobian, constraints, nullspace_basis, BeamMesh, ElementKernel, Inertia,
    Mat6x24, NodeState, Plane, Vec24, Vec6, NODE_DOF,
};
use crate::constitutive::{ConstitutiveLaw, DataPoint, Manifold};
use crate::linalg::{self, relative_error, Backend};
use crate::oracle::{fd_jacobian, fd_jacobian_dyn, random_dvector, random_rotation, random_svector, random_vector3};
use crate::solver::{
    kkt_matrix, kkt_residual, solve_dcnlp_enumerate, AssignmentMode, Formulation, Layout, NewtonOptions,
    PrimalDualState, StepProblem, WeightMatrix,
};

const FD_STEP: f64 = 1e-6;
const FD_TOL: f64 = 1e-6;
const EXACT_TOL: f64 = 1e-14;
const IDENTITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SelfCheckOptions {
    /// Random samples per check family.
    pub samples: usize,
    pub seed: u64,
    /// Mutation-testing hook: added to every entry of the strain Jacobian
    /// under test. Non-zero values must make exactly the strain Jacobian
    /// families fail.
    pub strain_jacobian_perturbation: f64,
}

impl Default for SelfCheckOptions {
    fn default() -> Self {
        Self {
            samples: 20,
            seed: 20_200_601,
            strain_jacobian_perturbation: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub family: &'static str,
    pub description: &'static str,
    pub samples: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelfCheckReport {
    pub options: SelfCheckOptions,
    pub checks: Vec<CheckResult>,
}

impl SelfCheckReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

struct Suite {
    rng: ChaCha8Rng,
    opts: SelfCheckOptions,
    checks: Vec<CheckResult>,
}

impl Suite {
    fn record(&mut self, family: &'static str, description: &'static str, samples: usize, err: f64, tol: f64) {
        self.checks.push(CheckResult {
            family,
            description,
            samples,
            max_error: err,
            tolerance: tol,
            passed: err.is_finite() && err <= tol,
        });
    }

    /// Runs `f` once per sample and records the largest error.
    fn family(
        &mut self,
        family: &'static str,
        description: &'static str,
        tol: f64,
        mut f: impl FnMut(&mut ChaCha8Rng, &SelfCheckOptions) -> f64,
    ) {
        let n = self.opts.samples;
        let mut worst = 0.0_f64;
        for _ in 0..n {
            let e = f(&mut self.rng, &self.opts);
            worst = if e.is_nan() { f64::NAN } else { worst.max(e) };
        }
        self.record(family, description, n, worst, tol);
    }
}

fn rel(a: &[f64], b: &[f64]) -> f64 {
    relative_error(a, b, 1e-8)
}

fn arc(n: usize) -> BeamMesh {
    BeamMesh::quarter_arc(2.0 / std::f64::consts::PI, n, Plane::Xy, Inertia::principal(10.0, 20.0, 20.0))
        .expect("valid arc")
}

fn laws() -> [ConstitutiveLaw; 3] {
    [
        ConstitutiveLaw::benchmark_linear(),
        ConstitutiveLaw::benchmark_explicit(),
        ConstitutiveLaw::benchmark_implicit(),
    ]
}

fn random_kernel(rng: &mut ChaCha8Rng) -> ElementKernel {
    let length = rng.gen_range(0.05..1.0);
    ElementKernel::new(length, &random_svector(rng, 1.0))
}

fn tested_b(kernel: &ElementKernel, q: &Vec24, opts: &SelfCheckOptions) -> Mat6x24 {
    kernel.strain_jacobian(q).add_scalar(opts.strain_jacobian_perturbation)
}

fn random_node(rng: &mut ChaCha8Rng) -> NodeState {
    NodeState::new(
        random_vector3(rng, 1.0),
        random_vector3(rng, 1.0),
        random_vector3(rng, 1.0),
        random_vector3(rng, 1.0),
    )
}

fn random_triad(rng: &mut ChaCha8Rng) -> NodeState {
    let r: Matrix3<f64> = random_rotation(rng);
    NodeState::new(
        random_vector3(rng, 1.0),
        r.column(0).into(),
        r.column(1).into(),
        r.column(2).into(),
    )
}

fn node_vec(n: &NodeState) -> SVector<f64, NODE_DOF> {
    let mut v = SVector::<f64, NODE_DOF>::zeros();
    n.write_to(v.as_mut_slice());
    v
}

fn random_problem<'a>(mesh: &'a BeamMesh, rng: &mut ChaCha8Rng) -> StepProblem<'a> {
    let q0 = mesh.reference().to_flat();
    let (nq, ns) = (mesh.n_dof(), 6 * mesh.n_elements());
    StepProblem::new(
        mesh,
        &q0 + random_dvector(rng, nq, 0.01),
        &q0 + random_dvector(rng, nq, 0.01),
        random_dvector(rng, ns, 3.0),
        random_dvector(rng, nq, 1.0),
        random_dvector(rng, nq, 1.0),
        0.01,
        WeightMatrix::diagonal(&[1.0, 2.0, 0.5, 1.0, 3.0, 1.5]).expect("positive weights"),
    )
    .expect("consistent problem")
}

fn random_state(mesh: &BeamMesh, rng: &mut ChaCha8Rng) -> PrimalDualState {
    let q = &mesh.reference().to_flat() + random_dvector(rng, mesh.n_dof(), 0.05);
    let mut st = PrimalDualState::at_rest(mesh, q);
    let (ne, nn) = (st.e.len(), st.mu.len());
    st.e = random_dvector(rng, ne, 0.1);
    st.s = random_dvector(rng, ne, 5.0);
    st.lambda = random_dvector(rng, ne, 1.0);
    st.mu = random_dvector(rng, nn, 1.0);
    st.nu = random_dvector(rng, nn, 1.0);
    st.e_check = random_dvector(rng, ne, 0.1);
    st.s_check = random_dvector(rng, ne, 5.0);
    st.xi = random_dvector(rng, ne, 1.0);
    st
}

fn random_points(n: usize, rng: &mut ChaCha8Rng) -> Vec<DataPoint> {
    (0..n)
        .map(|_| DataPoint::new(random_svector(rng, 0.1), random_svector(rng, 5.0)))
        .collect()
}

/// `(FD mismatch, asymmetry)` of a KKT matrix.
fn kkt_errors(problem: &StepProblem, state: &PrimalDualState, form: Formulation) -> (f64, f64) {
    let layout = Layout::new(problem.mesh(), form.is_approx());
    let x0 = layout.pack(state);
    let fd = fd_jacobian_dyn(
        |x| {
            let mut st = state.clone();
            layout.unpack_into(x, &mut st);
            kkt_residual(problem, &st, form).expect("consistent state")
        },
        &x0,
        FD_STEP,
    );
    let s = kkt_matrix(problem, state, form).expect("consistent state").to_dense();
    (rel(s.as_slice(), fd.as_slice()), (&s - s.transpose()).amax())
}

/// Runs all check families.
pub fn self_check(opts: &SelfCheckOptions) -> SelfCheckReport {
    let mut suite = Suite {
        rng: ChaCha8Rng::seed_from_u64(opts.seed),
        opts: *opts,
        checks: Vec::new(),
    };

    suite.family("strain_jacobian", "B against central differences of e(q)", FD_TOL, |rng, o| {
        let k = random_kernel(rng);
        let q: Vec24 = random_svector(rng, 1.0);
        let fd = fd_jacobian(|x| k.strain(x), &q, FD_STEP);
        rel(tested_b(&k, &q, o).as_slice(), fd.as_slice())
    });
    suite.family(
        "strain_jacobian_linearity",
        "B(2q) = 2B(q) and B at the midpoint is the mean",
        IDENTITY_TOL,
        |rng, o| {
            let k = random_kernel(rng);
            let (qa, qb): (Vec24, Vec24) = (random_svector(rng, 1.0), random_svector(rng, 1.0));
            let b = |q: &Vec24| tested_b(&k, q, o);
            let scale = b(&qa).amax().max(1.0);
            let e1 = (b(&(qa * 2.0)) - b(&qa) * 2.0).amax();
            let e2 = (b(&((qa + qb) * 0.5)) - (b(&qa) + b(&qb)) * 0.5).amax();
            e1.max(e2) / scale
        },
    );
    suite.family("strain_hessian_t", "U2(s) against differences of B(q)ᵀs", FD_TOL, |rng, _| {
        let k = random_kernel(rng);
        let q: Vec24 = random_svector(rng, 1.0);
        let s: Vec6 = random_svector(rng, 5.0);
        let fd = fd_jacobian(|x| k.strain_jacobian(x).transpose() * s, &q, FD_STEP);
        rel(k.strain_hessian_t(&s).as_slice(), fd.as_slice())
    });
    suite.family("strain_hessian_t_symmetry", "U2(s) = U2(s)ᵀ", EXACT_TOL, |rng, _| {
        let k = random_kernel(rng);
        let u = k.strain_hessian_t(&random_svector(rng, 5.0));
        (u - u.transpose()).amax()
    });
    suite.family("strain_hessian", "U1(a) against differences of B(q)a", FD_TOL, |rng, _| {
        let k = random_kernel(rng);
        let q: Vec24 = random_svector(rng, 1.0);
        let a: Vec24 = random_svector(rng, 1.0);
        let fd = fd_jacobian(|x| k.strain_jacobian(x) * a, &q, FD_STEP);
        rel(k.strain_hessian(&a).as_slice(), fd.as_slice())
    });
    suite.family("contraction_identity", "U1(a)ᵀs = U2(s)a", IDENTITY_TOL, |rng, _| {
        let k = random_kernel(rng);
        let a: Vec24 = random_svector(rng, 1.0);
        let s: Vec6 = random_svector(rng, 5.0);
        let lhs = k.strain_hessian(&a).transpose() * s;
        let rhs = k.strain_hessian_t(&s) * a;
        rel(lhs.as_slice(), rhs.as_slice())
    });
    suite.family("frame_invariance", "rigid motions leave e(q) unchanged", IDENTITY_TOL, |rng, _| {
        let mesh = arc(4);
        let r = random_rotation(rng);
        let t = random_vector3(rng, 2.0);
        let e = rng.gen_range(0..mesh.n_elements());
        let q = mesh.element_q(&mesh.reference().to_flat(), e);
        let mut moved = Vec24::zeros();
        for a in 0..2 {
            let n = NodeState::from_slice(&q.as_slice()[NODE_DOF * a..NODE_DOF * (a + 1)]);
            n.transformed(&r, &t)
                .write_to(&mut moved.as_mut_slice()[NODE_DOF * a..NODE_DOF * (a + 1)]);
        }
        mesh.kernel(e).strain(&moved).amax()
    });
    suite.family("constraint_jacobian", "G against differences of g", FD_TOL, |rng, _| {
        let x = node_vec(&random_node(rng));
        let fd = fd_jacobian(|v| constraints(&NodeState::from_slice(v.as_slice())), &x, FD_STEP);
        rel(constraint_jacobian(&NodeState::from_slice(x.as_slice())).as_slice(), fd.as_slice())
    });
    suite.family("constraint_curvature", "V(ν) against differences of G(q)ᵀν", FD_TOL, |rng, _| {
        let x = node_vec(&random_node(rng));
        let nu: Vec6 = random_svector(rng, 1.0);
        let fd = fd_jacobian(
            |v| constraint_jacobian(&NodeState::from_slice(v.as_slice())).transpose() * nu,
            &x,
            FD_STEP,
        );
        rel(constraint_curvature(&nu).as_slice(), fd.as_slice())
    });
    suite.family("constraint_curvature_symmetry", "V(ν) = V(ν)ᵀ", EXACT_TOL, |rng, _| {
        let v = constraint_curvature(&random_svector(rng, 1.0));
        (v - v.transpose()).amax()
    });
    suite.family("nullspace", "G(q)N(q) = 0 on orthonormal triads", EXACT_TOL, |rng, _| {
        let n = random_triad(rng);
        (constraint_jacobian(&n) * nullspace_basis(&n)).amax()
    });
    suite.family(
        "balance_jacobian",
        "F against differences of the projected balance residual",
        FD_TOL,
        |rng, _| {
            let mesh = arc(3);
            let p = random_problem(&mesh, rng);
            let q = p.q_curr() + random_dvector(rng, mesh.n_dof(), 0.01);
            let s = random_dvector(rng, 6 * mesh.n_elements(), 3.0);
            let fd = fd_jacobian_dyn(|x| p.reduced_balance_residual(x, &s), &q, FD_STEP);
            rel(p.balance_jacobian(&s).as_slice(), fd.as_slice())
        },
    );
    suite.family("manifold_derivatives", "∂ěh and ∂šh of all laws", FD_TOL, |rng, _| {
        let e: Vec6 = random_svector(rng, 0.1);
        let s: Vec6 = random_svector(rng, 5.0);
        laws()
            .iter()
            .map(|law| {
                let (he, hs) = law.derivatives(&e, &s);
                let fe = fd_jacobian(|x| law.residual(x, &s), &e, FD_STEP);
                let fs = fd_jacobian(|x| law.residual(&e, x), &s, FD_STEP);
                rel(he.as_slice(), fe.as_slice()).max(rel(hs.as_slice(), fs.as_slice()))
            })
            .fold(0.0, f64::max)
    });
    suite.family("manifold_curvature", "second derivatives of ξ·h of all laws", FD_TOL, |rng, _| {
        let e: Vec6 = random_svector(rng, 0.1);
        let s: Vec6 = random_svector(rng, 5.0);
        let xi: Vec6 = random_svector(rng, 1.0);
        laws()
            .iter()
            .map(|law| {
                let c = law.curvature(&e, &s, &xi);
                let ee = fd_jacobian(|x| law.derivatives(x, &s).0.transpose() * xi, &e, FD_STEP);
                let es = fd_jacobian(|x| law.derivatives(&e, x).0.transpose() * xi, &s, FD_STEP);
                let ss = fd_jacobian(|x| law.derivatives(&e, x).1.transpose() * xi, &s, FD_STEP);
                let floor = c.ee.amax().max(c.ss.amax()).max(1.0);
                [(c.ee - ee).amax(), (c.es - es).amax(), (c.ss - ss).amax()]
                    .into_iter()
                    .fold(0.0, f64::max)
                    / floor
            })
            .fold(0.0, f64::max)
    });

    let mesh = arc(3);
    let mut fix = (0.0_f64, 0.0_f64);
    let mut one = (0.0_f64, 0.0_f64);
    let n = opts.samples;
    for _ in 0..n {
        let p = random_problem(&mesh, &mut suite.rng);
        let st = random_state(&mesh, &mut suite.rng);
        let pts = random_points(mesh.n_elements(), &mut suite.rng);
        let (a, b) = kkt_errors(&p, &st, Formulation::Fix(&pts));
        fix = (fix.0.max(a), fix.1.max(b));
        for law in laws() {
            let (a, b) = kkt_errors(&p, &st, Formulation::Approx(&law));
            one = (one.0.max(a), one.1.max(b));
        }
    }
    suite.record("kkt_fix", "fixNLP KKT matrix against differences of its residual", n, fix.0, FD_TOL);
    suite.record("kkt_fix_symmetry", "fixNLP KKT matrix is symmetric", n, fix.1, EXACT_TOL);
    suite.record("kkt_approx", "approximate-NLP KKT matrix against differences, all laws", n, one.0, FD_TOL);
    suite.record("kkt_approx_symmetry", "approximate-NLP KKT matrix is symmetric", n, one.1, EXACT_TOL);

    let m = mesh.mass_matrix();
    let mut translational = 0.0;
    let mut d3_rows = 0.0_f64;
    for a in 0..mesh.n_nodes() {
        for b in 0..mesh.n_nodes() {
            translational += m[(NODE_DOF * a, NODE_DOF * b)];
        }
        for r in 9..12 {
            d3_rows = d3_rows.max(m.row(NODE_DOF * a + r).amax());
        }
    }
    let mass_err = (translational - mesh.inertia().e00 * mesh.total_length()).abs() + d3_rows + (&m - m.transpose()).amax();
    suite.record("mass_matrix", "total mass, zero d₃ rows, symmetry", 1, mass_err, IDENTITY_TOL);

    let mut backend_err = 0.0_f64;
    for _ in 0..n {
        let p = random_problem(&mesh, &mut suite.rng);
        let st = random_state(&mesh, &mut suite.rng);
        let law = ConstitutiveLaw::benchmark_explicit();
        let form = Formulation::Approx(&law);
        let a = kkt_matrix(&p, &st, form).expect("consistent state");
        let r = kkt_residual(&p, &st, form).expect("consistent state");
        let order = Layout::new(&mesh, true).ordering(&mesh);
        match (linalg::solve(&a, &r, Backend::Banded, &order), linalg::solve(&a, &r, Backend::Dense, &order)) {
            (Ok(x), Ok(y)) => backend_err = backend_err.max(rel(x.as_slice(), y.as_slice())),
            _ => backend_err = f64::INFINITY,
        }
    }
    suite.record("banded_backend", "banded and dense KKT solves agree", n, backend_err, 1e-9);

    let small = arc(2);
    let q0 = small.reference().to_flat();
    let f = DVector::from_fn(small.n_dof(), |i, _| if i % NODE_DOF == 2 { 1.0 } else { 0.0 });
    let p = StepProblem::new(
        &small,
        q0.clone(),
        q0.clone(),
        DVector::zeros(12),
        f.clone(),
        f,
        0.01,
        WeightMatrix::identity(),
    )
    .expect("consistent problem");
    let law = ConstitutiveLaw::benchmark_linear();
    let pts: Vec<DataPoint> = (0..3)
        .map(|k| {
            let e = Vec6::repeat(0.002 * (k as f64 - 1.0));
            DataPoint::new(e, law.stress(&e).expect("linear law"))
        })
        .collect();
    let data = crate::constitutive::MeasurementDataSet::new(pts.clone(), "self check").expect("non-empty");
    let init = PrimalDualState::at_rest(&small, q0);
    let options = NewtonOptions::default();
    let dcnlp_err = match solve_dcnlp_enumerate(&p, &data, AssignmentMode::Exhaustive, &init, &options) {
        Ok(sol) => {
            let mut best = (f64::INFINITY, vec![]);
            for i in 0..3 {
                for j in 0..3 {
                    let fixed = [pts[i], pts[j]];
                    if let Ok((st, _)) = crate::solver::newton_solve(&p, init.clone(), Formulation::Fix(&fixed), &options)
                    {
                        let c = crate::solver::dcnlp_cost(&p, &st, &fixed);
                        if c < best.0 {
                            best = (c, vec![i, j]);
                        }
                    }
                }
            }
            if best.1 == sol.assignment {
                (best.0 - sol.cost).abs()
            } else {
                f64::INFINITY
            }
        }
        Err(_) => f64::INFINITY,
    };
    suite.record("dcnlp_enumeration", "exhaustive DCNLP equals brute force over 9 assignments", 1, dcnlp_err, IDENTITY_TOL);

    SelfCheckReport {
        options: *opts,
        checks: suite.checks,
    }
}
