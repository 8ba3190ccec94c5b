//! Two-node director beam element with one-point quadrature.
//!
//! Every strain component is a quadratic form of the 24 element coordinates,
//! `e_c(q) = ½ qᵀ H_c q − e_ref,c`, because the Gauss-point fields are nodal
//! means and the arc-length derivatives are nodal differences divided by the
//! element length. The strain Jacobian `B(q)` (rows `(H_c q)ᵀ`) is therefore
//! linear in `q`, and its derivatives `U₁`, `U₂` are constant.

use nalgebra::{SMatrix, SVector};

use super::config::{D1, D2, D3, NODE_DOF, PHI};

pub const ELEM_DOF: usize = 2 * NODE_DOF;
/// Strain (and stress) components per element: γ₁ γ₂ γ₃ ω₁ ω₂ ω₃.
pub const STRAIN_DIM: usize = 6;

pub type Vec6 = SVector<f64, STRAIN_DIM>;
pub type Vec24 = SVector<f64, ELEM_DOF>;
pub type Mat6x24 = SMatrix<f64, STRAIN_DIM, ELEM_DOF>;
pub type Mat24 = SMatrix<f64, ELEM_DOF, ELEM_DOF>;
type Selector = SMatrix<f64, 3, ELEM_DOF>;

/// Constant element data: length, strain forms and reference strains.
#[derive(Debug, Clone)]
pub struct ElementKernel {
    length: f64,
    forms: Box<[Mat24; STRAIN_DIM]>,
    reference: Vec6,
}

/// Gauss-point value of the field stored at `offset`: mean of the two nodes.
fn mean(offset: usize) -> Selector {
    let mut s = Selector::zeros();
    for i in 0..3 {
        s[(i, offset + i)] = 0.5;
        s[(i, NODE_DOF + offset + i)] = 0.5;
    }
    s
}

/// Arc-length derivative of the field stored at `offset`: directed difference.
fn derivative(offset: usize, length: f64) -> Selector {
    let mut s = Selector::zeros();
    for i in 0..3 {
        s[(i, offset + i)] = -1.0 / length;
        s[(i, NODE_DOF + offset + i)] = 1.0 / length;
    }
    s
}

/// Hessian of `q ↦ (a q)·(b q)`.
fn product_form(a: &Selector, b: &Selector) -> Mat24 {
    let ab = a.transpose() * b;
    ab + ab.transpose()
}

impl ElementKernel {
    /// Builds the kernel; the reference strains are those of `q_ref`, so the
    /// reference configuration is stress free.
    pub fn new(length: f64, q_ref: &Vec24) -> Self {
        assert!(length > 0.0 && length.is_finite(), "element length must be positive");
        let dphi = derivative(PHI, length);
        let m = [mean(D1), mean(D2), mean(D3)];
        let d = [derivative(D1, length), derivative(D2, length), derivative(D3, length)];
        let half_skew = |i: usize, j: usize| {
            // ½ (d̄_i · d_j' − d̄_j · d_i')
            0.5 * (product_form(&m[i], &d[j]) - product_form(&m[j], &d[i]))
        };
        let forms = Box::new([
            product_form(&m[0], &dphi),
            product_form(&m[1], &dphi),
            product_form(&m[2], &dphi),
            half_skew(2, 1),
            half_skew(0, 2),
            half_skew(1, 0),
        ]);
        let mut kernel = Self {
            length,
            forms,
            reference: Vec6::zeros(),
        };
        kernel.reference = kernel.raw_strain(q_ref);
        kernel
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Reference strains `(γ_ref, ω_ref)`.
    pub fn reference(&self) -> &Vec6 {
        &self.reference
    }

    /// Constant Hessian of strain component `c`.
    pub fn form(&self, c: usize) -> &Mat24 {
        &self.forms[c]
    }

    fn raw_strain(&self, q: &Vec24) -> Vec6 {
        Vec6::from_fn(|c, _| 0.5 * q.dot(&(self.forms[c] * q)))
    }

    /// `e(q) = (γ(q) − γ_ref, ω(q) − ω_ref)` at the Gauss point.
    pub fn strain(&self, q: &Vec24) -> Vec6 {
        self.raw_strain(q) - self.reference
    }

    /// `B(q) = ∂e/∂q`.
    pub fn strain_jacobian(&self, q: &Vec24) -> Mat6x24 {
        let mut b = Mat6x24::zeros();
        for c in 0..STRAIN_DIM {
            b.set_row(c, &(self.forms[c] * q).transpose());
        }
        b
    }

    /// `U₂(s) = ∂_q(B(q)ᵀ s)`.
    pub fn strain_hessian_t(&self, s: &Vec6) -> Mat24 {
        let mut u = Mat24::zeros();
        for c in 0..STRAIN_DIM {
            if s[c] != 0.0 {
                u += s[c] * self.forms[c];
            }
        }
        u
    }

    /// `U₁(a) = ∂_q(B(q) a)`.
    pub fn strain_hessian(&self, a: &Vec24) -> Mat6x24 {
        // B(q) a has rows qᵀ H_c a, so the same computation as B at `a`.
        self.strain_jacobian(a)
    }
}
