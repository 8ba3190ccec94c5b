//! Central finite differences and random samplers shared by the unit tests
//! and the `self_check` suite.

use nalgebra::{DMatrix, DVector, Matrix3, SMatrix, SVector, UnitQuaternion, Vector3, Vector4};
use rand::Rng;

/// Central-difference Jacobian of a fixed-size map.
pub fn fd_jacobian<const M: usize, const N: usize>(
    f: impl Fn(&SVector<f64, N>) -> SVector<f64, M>,
    x: &SVector<f64, N>,
    h: f64,
) -> SMatrix<f64, M, N> {
    let mut jac = SMatrix::<f64, M, N>::zeros();
    let mut xp = *x;
    for j in 0..N {
        let x0 = xp[j];
        xp[j] = x0 + h;
        let fp = f(&xp);
        xp[j] = x0 - h;
        let fm = f(&xp);
        xp[j] = x0;
        jac.set_column(j, &((fp - fm) / (2.0 * h)));
    }
    jac
}

/// Central-difference Jacobian of a map between dynamic vectors.
pub fn fd_jacobian_dyn(f: impl Fn(&DVector<f64>) -> DVector<f64>, x: &DVector<f64>, h: f64) -> DMatrix<f64> {
    let mut xp = x.clone();
    let mut cols = Vec::with_capacity(x.len());
    for j in 0..x.len() {
        let x0 = xp[j];
        xp[j] = x0 + h;
        let fp = f(&xp);
        xp[j] = x0 - h;
        let fm = f(&xp);
        xp[j] = x0;
        cols.push((fp - fm) / (2.0 * h));
    }
    DMatrix::from_columns(&cols)
}

/// Uniformly distributed rotation: a 4-vector drawn uniformly in the unit ball, normalized to a quaternion.
pub fn random_rotation(rng: &mut impl Rng) -> Matrix3<f64> {
    loop {
        let v = Vector4::from_fn(|_, _| rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            let q = UnitQuaternion::from_quaternion(nalgebra::Quaternion::from(v / n));
            return q.to_rotation_matrix().into_inner();
        }
    }
}

pub fn random_vector3(rng: &mut impl Rng, scale: f64) -> Vector3<f64> {
    Vector3::from_fn(|_, _| rng.gen_range(-scale..scale))
}

pub fn random_svector<const N: usize>(rng: &mut impl Rng, scale: f64) -> SVector<f64, N> {
    SVector::<f64, N>::from_fn(|_, _| rng.gen_range(-scale..scale))
}

pub fn random_dvector(rng: &mut impl Rng, n: usize, scale: f64) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.gen_range(-scale..scale))
}

/// Random element coordinates in `[-1, 1]²⁴`.
pub fn random_vec24(rng: &mut impl Rng) -> SVector<f64, 24> {
    random_svector(rng, 1.0)
}
