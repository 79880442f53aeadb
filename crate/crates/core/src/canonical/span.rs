//! Product vectors inside a two-dimensional subspace of two-qubit space.
//!
//! A vector `x·v₀ + y·v₁` is a product state exactly when the determinant of
//! its 2×2 amplitude matrix vanishes, which is a homogeneous quadratic in
//! `(x : y)`.

use crate::error::{Error, Result};
use crate::linalg::{svd2, Mat2, Vec2, C64, ZERO};

/// Projective roots of `A x² + B xy + C y² = 0`, each normalized so that
/// `|x|² + |y|² = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum PencilRoots {
    Two([(C64, C64); 2]),
    Double((C64, C64)),
    All,
}

/// Quadratic coefficients of `det(x·m0 + y·m1)`.
pub(crate) fn pencil_coefficients(m0: &Mat2, m1: &Mat2) -> (C64, C64, C64) {
    let a = m0.determinant();
    let c = m1.determinant();
    let b = m0[(0, 0)] * m1[(1, 1)] + m0[(1, 1)] * m1[(0, 0)]
        - m0[(0, 1)] * m1[(1, 0)]
        - m0[(1, 0)] * m1[(0, 1)];
    (a, b, c)
}

fn normalized(x: C64, y: C64) -> (C64, C64) {
    let n = (x.norm_sqr() + y.norm_sqr()).sqrt();
    (x / n, y / n)
}

/// Roots of `det(x·m0 + y·m1) = 0`. `double_tol` is the relative
/// discriminant size below which the two roots are merged.
pub(crate) fn pencil_roots(m0: &Mat2, m1: &Mat2, double_tol: f64) -> PencilRoots {
    let (a, b, c) = pencil_coefficients(m0, m1);
    let reference = (m0.norm() + m1.norm()).powi(2);
    let scale = a.norm().max(b.norm()).max(c.norm());
    if scale <= 1e-14 * reference || scale == 0.0 {
        return PencilRoots::All;
    }
    let (a, b, c) = (a / scale, b / scale, c / scale);
    let disc = b * b - a * c * 4.0;
    if disc.norm() <= double_tol {
        // t = x/y = -b/2a, or its reciprocal when a is the smaller end
        let root = if a.norm() >= c.norm() {
            normalized(-b, a * 2.0)
        } else {
            normalized(c * 2.0, -b)
        };
        return PencilRoots::Double(root);
    }
    let mut sq = disc.sqrt();
    if (b.conj() * sq).re < 0.0 {
        sq = -sq;
    }
    let q = -(b + sq) * 0.5;
    // x/y = q/a and x/y = c/q
    PencilRoots::Two([normalized(q, a), normalized(c, q)])
}

/// A normalized product vector `|β⟩|γ⟩` found in a span, with the
/// combination coefficients that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductVector {
    pub coefficients: (C64, C64),
    pub vector: [C64; 4],
    pub factors: (Vec2, Vec2),
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpanProducts {
    /// One entry for a double root, two for distinct roots.
    Finite(Vec<ProductVector>),
    /// Every vector of the span is a product state.
    All,
}

impl SpanProducts {
    pub fn count(&self) -> Option<usize> {
        match self {
            SpanProducts::Finite(v) => Some(v.len()),
            SpanProducts::All => None,
        }
    }
}

pub(crate) fn as_matrix(v: &[C64; 4]) -> Mat2 {
    Mat2::new(v[0], v[1], v[2], v[3])
}

/// Factors a (numerically) rank-one 2×2 amplitude matrix into `|β⟩ ⊗ |γ⟩`
/// with unit-norm factors; the scalar is returned separately.
pub(crate) fn factor_product(m: &Mat2) -> (C64, Vec2, Vec2) {
    let (u, s, v) = svd2(m);
    let beta = Vec2::new(u[(0, 0)], u[(1, 0)]);
    let gamma = Vec2::new(v[(0, 0)].conj(), v[(1, 0)].conj());
    (C64::new(s[0], 0.0), beta, gamma)
}

fn product_vector(v0: &[C64; 4], v1: &[C64; 4], (x, y): (C64, C64)) -> ProductVector {
    let mut vector = [ZERO; 4];
    for i in 0..4 {
        vector[i] = x * v0[i] + y * v1[i];
    }
    let n = vector.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    vector.iter_mut().for_each(|z| *z /= n);
    let (_, beta, gamma) = factor_product(&as_matrix(&vector));
    ProductVector { coefficients: (x, y), vector, factors: (beta, gamma) }
}

/// Relative discriminant size treated as a double root.
const DOUBLE_ROOT_TOL: f64 = 1e-10;

/// Product states in `span{v0, v1}` of two-qubit vectors.
pub fn product_states_in_span(v0: &[C64; 4], v1: &[C64; 4]) -> Result<SpanProducts> {
    let n0: f64 = v0.iter().map(|z| z.norm_sqr()).sum();
    let n1: f64 = v1.iter().map(|z| z.norm_sqr()).sum();
    let overlap: C64 = v0.iter().zip(v1).map(|(a, b)| a.conj() * b).sum();
    if n0 * n1 - overlap.norm_sqr() <= 1e-12 * n0 * n1 || n0 == 0.0 || n1 == 0.0 {
        return Err(Error::DependentInputs);
    }
    Ok(match pencil_roots(&as_matrix(v0), &as_matrix(v1), DOUBLE_ROOT_TOL) {
        PencilRoots::All => SpanProducts::All,
        PencilRoots::Double(r) => SpanProducts::Finite(vec![product_vector(v0, v1, r)]),
        PencilRoots::Two([r0, r1]) => {
            SpanProducts::Finite(vec![product_vector(v0, v1, r0), product_vector(v0, v1, r1)])
        }
    })
}
