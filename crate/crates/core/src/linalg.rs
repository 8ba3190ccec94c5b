//! Small dense helpers, a triplet matrix builder and the two linear-solver
//! backends used for the KKT systems.
//!
//! The banded backend is a row-major LU with partial pivoting in the style of
//! LAPACK `gbtrf`/`gbtrs`. KKT matrices of a beam mesh become banded once the
//! unknowns are interleaved node by node and element by element, so the
//! factorization cost grows linearly with the mesh size.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

/// Skew-symmetric matrix with `hat(a) * b == a.cross(&b)`.
pub fn hat(a: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -a.z, a.y, a.z, 0.0, -a.x, -a.y, a.x, 0.0)
}

pub fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// `‖a − b‖_max / max(‖b‖_max, floor)`.
pub fn relative_error(a: &[f64], b: &[f64], floor: f64) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let diff = a
        .iter()
        .zip(b)
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
    diff / max_abs(b).max(floor)
}

/// Coordinate-format matrix; duplicate entries are summed on conversion.
#[derive(Debug, Clone)]
pub struct Triplets {
    n: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl Triplets {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            entries: Vec::new(),
        }
    }

    pub fn with_capacity(n: usize, cap: usize) -> Self {
        Self {
            n,
            entries: Vec::with_capacity(cap),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    #[inline]
    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.n && col < self.n);
        if value != 0.0 {
            self.entries.push((row, col, value));
        }
    }

    /// Adds `scale * block` with its top-left corner at `(row0, col0)`.
    pub fn add_block<R, C, S>(
        &mut self,
        row0: usize,
        col0: usize,
        block: &nalgebra::Matrix<f64, R, C, S>,
        scale: f64,
    ) where
        R: nalgebra::Dim,
        C: nalgebra::Dim,
        S: nalgebra::RawStorage<f64, R, C>,
    {
        for j in 0..block.ncols() {
            for i in 0..block.nrows() {
                self.push(row0 + i, col0 + j, scale * block[(i, j)]);
            }
        }
    }

    /// Adds `scale * block` and `scale * blockᵀ` in the mirrored position.
    pub fn add_block_sym<R, C, S>(
        &mut self,
        row0: usize,
        col0: usize,
        block: &nalgebra::Matrix<f64, R, C, S>,
        scale: f64,
    ) where
        R: nalgebra::Dim,
        C: nalgebra::Dim,
        S: nalgebra::RawStorage<f64, R, C>,
    {
        for j in 0..block.ncols() {
            for i in 0..block.nrows() {
                let v = scale * block[(i, j)];
                self.push(row0 + i, col0 + j, v);
                self.push(col0 + j, row0 + i, v);
            }
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for &(i, j, v) in &self.entries {
            m[(i, j)] += v;
        }
        m
    }

    pub fn mul_vec(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut y = DVector::zeros(self.n);
        for &(i, j, v) in &self.entries {
            y[i] += v * x[j];
        }
        y
    }

    fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }
}

/// Linear-solver backend for the Newton step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    /// Dense LU with partial pivoting.
    Dense,
    /// Banded LU with partial pivoting on an interleaved ordering.
    #[default]
    Banded,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Singular {
    pub row: usize,
    pub pivot: f64,
}

/// Relative pivot threshold below which a matrix is reported singular.
const PIVOT_TOL: f64 = 1e-13;

/// Solves `A x = b`. `ordering[i]` is the position of natural unknown `i` in
/// the banded layout; it is ignored by the dense backend.
pub fn solve(
    a: &Triplets,
    b: &DVector<f64>,
    backend: Backend,
    ordering: &[usize],
) -> Result<DVector<f64>, Singular> {
    match backend {
        Backend::Dense => solve_dense(&a.to_dense(), b),
        Backend::Banded => {
            let lu = BandLu::factor(a, ordering)?;
            Ok(lu.solve(b))
        }
    }
}

pub fn solve_dense(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>, Singular> {
    let scale = max_abs(a.as_slice());
    if scale == 0.0 || !scale.is_finite() {
        return Err(Singular { row: 0, pivot: 0.0 });
    }
    let lu = a.clone().lu();
    let u = lu.u();
    for (i, p) in u.diagonal().iter().enumerate() {
        if p.abs() <= PIVOT_TOL * scale {
            return Err(Singular { row: i, pivot: *p });
        }
    }
    lu.solve(b).ok_or(Singular { row: 0, pivot: 0.0 })
}

/// Banded LU factors of a permuted matrix.
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    band: Vec<f64>,
    pivots: Vec<usize>,
    perm: Vec<usize>,
}

impl BandLu {
    /// Bandwidths `(kl, ku)` of `a` under `ordering`.
    pub fn bandwidths(a: &Triplets, ordering: &[usize]) -> (usize, usize) {
        let mut kl = 0;
        let mut ku = 0;
        for &(i, j, _) in a.entries() {
            let (pi, pj) = (ordering[i], ordering[j]);
            if pi > pj {
                kl = kl.max(pi - pj);
            } else {
                ku = ku.max(pj - pi);
            }
        }
        (kl, ku)
    }

    pub fn factor(a: &Triplets, ordering: &[usize]) -> Result<Self, Singular> {
        let n = a.dim();
        assert_eq!(ordering.len(), n, "ordering length");
        let (kl, ku) = Self::bandwidths(a, ordering);
        let width = 2 * kl + ku + 1;
        let mut band = vec![0.0; n * width];
        let mut scale = 0.0_f64;
        for &(i, j, v) in a.entries() {
            let (pi, pj) = (ordering[i], ordering[j]);
            band[pi * width + (pj + kl - pi)] += v;
        }
        for v in &band {
            scale = scale.max(v.abs());
        }
        if scale == 0.0 || !scale.is_finite() {
            return Err(Singular { row: 0, pivot: 0.0 });
        }
        let mut pivots = vec![0; n];
        let at = |i: usize, j: usize| i * width + (j + kl - i);

        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = band[at(k, k)].abs();
            for i in k + 1..=last {
                let v = band[at(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best <= PIVOT_TOL * scale {
                return Err(Singular { row: k, pivot: best });
            }
            pivots[k] = p;
            let jmax = (k + kl + ku).min(n - 1);
            if p != k {
                for j in k..=jmax {
                    band.swap(at(k, j), at(p, j));
                }
            }
            let pivot = band[at(k, k)];
            if jmax == k {
                for i in k + 1..=last {
                    band[at(i, k)] /= pivot;
                }
                continue;
            }
            let len = jmax - k;
            let (head, tail) = band.split_at_mut((k + 1) * width);
            let urow = &head[at(k, k + 1)..at(k, k + 1) + len];
            for i in k + 1..=last {
                let base = (i - k - 1) * width;
                let lik_pos = base + (k + kl - i);
                let l = tail[lik_pos] / pivot;
                tail[lik_pos] = l;
                if l == 0.0 {
                    continue;
                }
                let start = base + (k + 1 + kl - i);
                let row = &mut tail[start..start + len];
                for (r, u) in row.iter_mut().zip(urow) {
                    *r -= l * u;
                }
            }
        }
        Ok(Self {
            n,
            kl,
            ku,
            width,
            band,
            pivots,
            perm: ordering.to_vec(),
        })
    }

    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        let n = self.n;
        let (kl, ku, width) = (self.kl, self.ku, self.width);
        let at = |i: usize, j: usize| i * width + (j + kl - i);
        let mut y = vec![0.0; n];
        for i in 0..n {
            y[self.perm[i]] = b[i];
        }
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                y.swap(k, p);
            }
            let yk = y[k];
            if yk != 0.0 {
                for i in k + 1..=(k + kl).min(n.saturating_sub(1)) {
                    y[i] -= self.band[at(i, k)] * yk;
                }
            }
        }
        for i in (0..n).rev() {
            let jmax = (i + kl + ku).min(n - 1);
            let mut s = y[i];
            for j in i + 1..=jmax {
                s -= self.band[at(i, j)] * y[j];
            }
            y[i] = s / self.band[at(i, i)];
        }
        DVector::from_fn(n, |i, _| y[self.perm[i]])
    }

    pub fn bandwidth(&self) -> (usize, usize) {
        (self.kl, self.ku)
    }
}
