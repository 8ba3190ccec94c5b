use nalgebra::SMatrix;
use serde::{Deserialize, Serialize};

use crate::beam::Vec6;
use crate::error::{Error, Result};

pub type Mat6 = SMatrix<f64, 6, 6>;

/// Second derivatives of `ξ · h(ě, š)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Curvature {
    /// `∂ě(∂ě hᵀ ξ)`
    pub ee: Mat6,
    /// `∂š(∂ě hᵀ ξ)`
    pub es: Mat6,
    /// `∂š(∂š hᵀ ξ)`
    pub ss: Mat6,
}

/// Implicit constitutive manifold `{(ě, š) : h(ě, š) = 0}`.
pub trait Manifold: Send + Sync {
    fn residual(&self, e: &Vec6, s: &Vec6) -> Vec6;

    /// `(∂ě h, ∂š h)`.
    fn derivatives(&self, e: &Vec6, s: &Vec6) -> (Mat6, Mat6);

    fn curvature(&self, e: &Vec6, s: &Vec6, xi: &Vec6) -> Curvature;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LawKind {
    Linear,
    ExplicitQuadratic,
    ImplicitQuadratic,
}

/// Diagonal constitutive law.
///
/// `a` always holds the stiffnesses `aⁱⁱ`. For the explicit quadratic law
/// `b` holds `bⁱⁱⁱ` (stress per squared strain); for the implicit quadratic
/// law it holds the compliance coefficients `b_iii` (strain per squared stress).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstitutiveLaw {
    kind: LawKind,
    a: Vec6,
    b: Vec6,
}

/// Benchmark stiffnesses: shear 75 N, axial 100 N, bending 100 N·m², torsion 200 N·m².
pub fn benchmark_stiffness() -> Vec6 {
    Vec6::new(75.0, 75.0, 100.0, 100.0, 100.0, 200.0)
}

impl ConstitutiveLaw {
    pub fn new(kind: LawKind, a: Vec6, b: Vec6) -> Result<Self> {
        if let Some(i) = a.iter().position(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidInput(format!(
                "stiffness a[{}] = {} must be positive and finite",
                i + 1,
                a[i]
            )));
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("quadratic coefficients must be finite".into()));
        }
        let b = if kind == LawKind::Linear { Vec6::zeros() } else { b };
        Ok(Self { kind, a, b })
    }

    pub fn linear(a: Vec6) -> Result<Self> {
        Self::new(LawKind::Linear, a, Vec6::zeros())
    }

    pub fn explicit_quadratic(a: Vec6, b: Vec6) -> Result<Self> {
        Self::new(LawKind::ExplicitQuadratic, a, b)
    }

    pub fn implicit_quadratic(a: Vec6, b: Vec6) -> Result<Self> {
        Self::new(LawKind::ImplicitQuadratic, a, b)
    }

    /// Linear law with the benchmark stiffnesses.
    pub fn benchmark_linear() -> Self {
        Self::linear(benchmark_stiffness()).expect("positive stiffness")
    }

    /// Explicit quadratic law with `bⁱⁱⁱ = 0.6375 aⁱⁱ`.
    pub fn benchmark_explicit() -> Self {
        let a = benchmark_stiffness();
        Self::explicit_quadratic(a, a * 0.6375).expect("positive stiffness")
    }

    /// Implicit quadratic law with `b_iii = 0.015 a_ii`, `a_ii = 1/aⁱⁱ`.
    pub fn benchmark_implicit() -> Self {
        let a = benchmark_stiffness();
        Self::implicit_quadratic(a, a.map(|v| 0.015 / v)).expect("positive stiffness")
    }

    pub fn kind(&self) -> LawKind {
        self.kind
    }

    pub fn a(&self) -> &Vec6 {
        &self.a
    }

    pub fn b(&self) -> &Vec6 {
        &self.b
    }

    /// Compliances `a_ii = 1/aⁱⁱ`.
    pub fn compliance(&self) -> Vec6 {
        self.a.map(|v| 1.0 / v)
    }

    /// Stress on the branch through the origin for a given strain, if it exists.
    pub fn stress(&self, e: &Vec6) -> Option<Vec6> {
        let mut s = Vec6::zeros();
        for i in 0..6 {
            let (a, b, x) = (self.a[i], self.b[i], e[i]);
            s[i] = match self.kind {
                LawKind::Linear => a * x,
                LawKind::ExplicitQuadratic => a * x + 0.5 * b * x * x,
                LawKind::ImplicitQuadratic => {
                    // x = c š + (b/2) š², root continuous at x = 0
                    let c = 1.0 / a;
                    let disc = c * c + 2.0 * b * x;
                    if disc < 0.0 {
                        return None;
                    }
                    2.0 * x / (c + disc.sqrt())
                }
            };
        }
        Some(s)
    }

    /// Roots of `h(ě, 0) = 0` and `h(0, š) = 0` and whether any nonzero root
    /// falls inside the operating range.
    pub fn consistency_check(&self, range: &OperatingRange) -> ConsistencyReport {
        let mut spurious = Vec::new();
        for i in 0..6 {
            if self.b[i] == 0.0 {
                continue;
            }
            let (variable, location) = match self.kind {
                LawKind::Linear => continue,
                LawKind::ExplicitQuadratic => (Variable::Strain, -2.0 * self.a[i] / self.b[i]),
                LawKind::ImplicitQuadratic => (Variable::Stress, -2.0 / (self.a[i] * self.b[i])),
            };
            let bound = match variable {
                Variable::Strain => range.strain,
                Variable::Stress => range.stress,
            };
            spurious.push(SpuriousRoot {
                component: i,
                variable,
                location,
                inside_range: location.abs() <= bound,
            });
        }
        let anchored = self.residual(&Vec6::zeros(), &Vec6::zeros()) == Vec6::zeros();
        ConsistencyReport {
            passed: anchored && spurious.iter().all(|r| !r.inside_range),
            spurious,
        }
    }
}

impl Manifold for ConstitutiveLaw {
    fn residual(&self, e: &Vec6, s: &Vec6) -> Vec6 {
        let (a, b) = (&self.a, &self.b);
        Vec6::from_fn(|i, _| match self.kind {
            LawKind::Linear => s[i] - a[i] * e[i],
            LawKind::ExplicitQuadratic => s[i] - a[i] * e[i] - 0.5 * b[i] * e[i] * e[i],
            LawKind::ImplicitQuadratic => e[i] - s[i] / a[i] - 0.5 * b[i] * s[i] * s[i],
        })
    }

    fn derivatives(&self, e: &Vec6, s: &Vec6) -> (Mat6, Mat6) {
        let (a, b) = (&self.a, &self.b);
        match self.kind {
            LawKind::Linear => (Mat6::from_diagonal(&(-a)), Mat6::identity()),
            LawKind::ExplicitQuadratic => (
                Mat6::from_diagonal(&Vec6::from_fn(|i, _| -a[i] - b[i] * e[i])),
                Mat6::identity(),
            ),
            LawKind::ImplicitQuadratic => (
                Mat6::identity(),
                Mat6::from_diagonal(&Vec6::from_fn(|i, _| -1.0 / a[i] - b[i] * s[i])),
            ),
        }
    }

    fn curvature(&self, _e: &Vec6, _s: &Vec6, xi: &Vec6) -> Curvature {
        let bxi = Mat6::from_diagonal(&(-self.b.component_mul(xi)));
        let zero = Mat6::zeros();
        match self.kind {
            LawKind::Linear => Curvature { ee: zero, es: zero, ss: zero },
            LawKind::ExplicitQuadratic => Curvature { ee: bxi, es: zero, ss: zero },
            LawKind::ImplicitQuadratic => Curvature { ee: zero, es: zero, ss: bxi },
        }
    }
}

/// Magnitudes of strain and stress within which a spurious root would matter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingRange {
    pub strain: f64,
    pub stress: f64,
}

impl Default for OperatingRange {
    fn default() -> Self {
        Self {
            strain: 1.0,
            stress: 100.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variable {
    Strain,
    Stress,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpuriousRoot {
    pub component: usize,
    pub variable: Variable,
    pub location: f64,
    pub inside_range: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub passed: bool,
    pub spurious: Vec<SpuriousRoot>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{fd_jacobian, random_svector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn all_laws() -> [ConstitutiveLaw; 3] {
        [
            ConstitutiveLaw::benchmark_linear(),
            ConstitutiveLaw::benchmark_explicit(),
            ConstitutiveLaw::benchmark_implicit(),
        ]
    }

    #[test]
    fn origin_is_on_every_manifold() {
        for law in all_laws() {
            assert_eq!(law.residual(&Vec6::zeros(), &Vec6::zeros()), Vec6::zeros());
        }
    }

    #[test]
    fn linear_law_point() {
        let law = ConstitutiveLaw::benchmark_linear();
        let e = Vec6::new(1.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        let s = Vec6::new(75.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        assert_eq!(law.residual(&e, &s), Vec6::zeros());
        let (he, hs) = law.derivatives(&e, &s);
        assert_eq!(he, Mat6::from_diagonal(&(-benchmark_stiffness())));
        assert_eq!(hs, Mat6::identity());
    }

    #[test]
    fn explicit_quadratic_point() {
        let law = ConstitutiveLaw::benchmark_explicit();
        let e = Vec6::new(1.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        let s = Vec6::new(75.0 + 23.90625, 0.0, 0.0, 0.0, 0.0, 0.0);
        assert!(law.residual(&e, &s).amax() < 1e-12);
        assert!((law.stress(&e).unwrap() - s).amax() < 1e-12);
    }

    #[test]
    fn implicit_stress_lies_on_manifold() {
        let law = ConstitutiveLaw::benchmark_implicit();
        let e = Vec6::new(0.1, -0.2, 0.05, 0.3, -0.01, 0.2);
        let s = law.stress(&e).unwrap();
        assert!(law.residual(&e, &s).amax() < 1e-14);
        let (_, hs) = law.derivatives(&Vec6::zeros(), &Vec6::zeros());
        assert_eq!(hs, Mat6::from_diagonal(&(-law.compliance())));
    }

    #[test]
    fn derivatives_and_curvature_match_fd() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for law in all_laws() {
            for _ in 0..20 {
                let e: Vec6 = random_svector(&mut rng, 0.5);
                let s: Vec6 = random_svector(&mut rng, 30.0);
                let xi: Vec6 = random_svector(&mut rng, 1.0);
                let (he, hs) = law.derivatives(&e, &s);
                let fe = fd_jacobian(|x| law.residual(x, &s), &e, 1e-6);
                let fs = fd_jacobian(|x| law.residual(&e, x), &s, 1e-6);
                assert!((fe - he).amax() <= 1e-8 * he.amax().max(1.0));
                assert!((fs - hs).amax() <= 1e-8 * hs.amax().max(1.0));

                let c = law.curvature(&e, &s, &xi);
                let ge = |ee: &Vec6, ss: &Vec6| law.derivatives(ee, ss).0.transpose() * xi;
                let gs = |ee: &Vec6, ss: &Vec6| law.derivatives(ee, ss).1.transpose() * xi;
                let fee = fd_jacobian(|x| ge(x, &s), &e, 1e-6);
                let fes = fd_jacobian(|x| ge(&e, x), &s, 1e-6);
                let fss = fd_jacobian(|x| gs(&e, x), &s, 1e-6);
                let tol = 1e-8 * c.ee.amax().max(c.ss.amax()).max(1.0);
                assert!((fee - c.ee).amax() <= tol);
                assert!((fes - c.es).amax() <= tol);
                assert!((fss - c.ss).amax() <= tol);
            }
        }
    }

    #[test]
    fn curvature_vanishes_for_zero_multiplier_and_linear_law() {
        let z = Vec6::zeros();
        for law in all_laws() {
            let c = law.curvature(&z, &z, &z);
            assert_eq!((c.ee, c.es, c.ss), (Mat6::zeros(), Mat6::zeros(), Mat6::zeros()));
        }
        let c = ConstitutiveLaw::benchmark_linear().curvature(&z, &z, &Vec6::repeat(1.0));
        assert_eq!(c.ee + c.es + c.ss, Mat6::zeros());
    }

    #[test]
    fn linear_law_has_constant_symmetric_stiffness() {
        let law = ConstitutiveLaw::benchmark_linear();
        let (h1, _) = law.derivatives(&Vec6::repeat(0.3), &Vec6::repeat(-2.0));
        let (h2, _) = law.derivatives(&Vec6::zeros(), &Vec6::zeros());
        assert_eq!(h1, h2);
        assert_eq!(h1, h1.transpose());
    }

    #[test]
    fn consistency_reports_spurious_roots() {
        let range = OperatingRange::default();
        let lin = ConstitutiveLaw::benchmark_linear().consistency_check(&range);
        assert!(lin.passed && lin.spurious.is_empty());

        let exp = ConstitutiveLaw::benchmark_explicit().consistency_check(&range);
        assert!(exp.passed);
        assert_eq!(exp.spurious.len(), 6);
        for r in &exp.spurious {
            assert_eq!(r.variable, Variable::Strain);
            assert!((r.location + 2.0 / 0.6375).abs() < 1e-12);
        }

        let imp = ConstitutiveLaw::benchmark_implicit().consistency_check(&range);
        assert!(imp.passed);
        for r in &imp.spurious {
            assert_eq!(r.variable, Variable::Stress);
            assert!((r.location + 2.0 / 0.015).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_nonpositive_stiffness() {
        assert!(ConstitutiveLaw::linear(Vec6::new(1.0, 0.0, 1.0, 1.0, 1.0, 1.0)).is_err());
    }
}
