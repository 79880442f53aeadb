//! Small dense linear-algebra helpers on 2×2 complex matrices.

use nalgebra::{DMatrix, Matrix2, SymmetricEigen, Vector2};
use num_complex::Complex64;
use std::f64::consts::PI;

pub type C64 = Complex64;
pub type Mat2 = Matrix2<C64>;
pub type Vec2 = Vector2<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `exp(-i ξ σ_x)`
pub fn rx_matrix(angle: f64) -> Mat2 {
    let (s, co) = angle.sin_cos();
    Mat2::new(c(co, 0.0), c(0.0, -s), c(0.0, -s), c(co, 0.0))
}

/// `exp(-i ξ σ_y)`; rotates `cos φ|0⟩ + sin φ|1⟩` to angle `φ + ξ`.
pub fn ry_matrix(angle: f64) -> Mat2 {
    let (s, co) = angle.sin_cos();
    Mat2::new(c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0))
}

/// `exp(-i ξ σ_z)`
pub fn rz_matrix(angle: f64) -> Mat2 {
    Mat2::new(C64::from_polar(1.0, -angle), ZERO, ZERO, C64::from_polar(1.0, angle))
}

/// `diag(1, e^{iξ})`
pub fn phase_matrix(angle: f64) -> Mat2 {
    Mat2::new(ONE, ZERO, ZERO, C64::from_polar(1.0, angle))
}

pub fn real_qubit(angle: f64) -> Vec2 {
    Vec2::new(c(angle.cos(), 0.0), c(angle.sin(), 0.0))
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(x: f64) -> f64 {
    let mut y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    y
}

/// Unitary whose first row is `⟨v̂|`, so that `W v = ‖v‖ |0⟩`.
/// A zero vector yields the identity.
pub fn align_to_zero(v: &Vec2) -> Mat2 {
    let n = v.norm();
    if n < 1e-300 {
        return Mat2::identity();
    }
    let (a, b) = (v[0] / n, v[1] / n);
    Mat2::new(a.conj(), b.conj(), -b, a)
}

/// Unit vector orthogonal to `v`.
fn complement(v: &Vec2) -> Vec2 {
    Vec2::new(-v[1].conj(), v[0].conj())
}

/// Eigenvalues `(largest, smallest)` of a 2×2 Hermitian matrix and a unit
/// eigenvector of the largest.
pub fn hermitian2_top(m: &Mat2) -> (f64, f64, Vec2) {
    let (a, d, b) = (m[(0, 0)].re, m[(1, 1)].re, m[(0, 1)]);
    let half = (a - d) / 2.0;
    let r = half.hypot(b.norm());
    let mean = (a + d) / 2.0;
    let (hi, lo) = (mean + r, mean - r);
    // of the two eigenvector expressions, the one without cancellation
    let v = if half >= 0.0 {
        Vec2::new(C64::new(half + r, 0.0), b.conj())
    } else {
        Vec2::new(b, C64::new(r - half, 0.0))
    };
    let n = v.norm();
    if n <= 1e-300 {
        return (hi, lo, Vec2::new(ONE, ZERO));
    }
    (hi, lo, v / C64::new(n, 0.0))
}

/// Singular value decomposition `m = U diag(s) V†`, singular values descending.
pub fn svd2(m: &Mat2) -> (Mat2, [f64; 2], Mat2) {
    let (_, _, v0) = hermitian2_top(&(m.adjoint() * m));
    let mv0 = m * v0;
    let s0 = mv0.norm();
    let u0 = if s0 > 1e-300 { mv0 / C64::new(s0, 0.0) } else { Vec2::new(ONE, ZERO) };
    let v1 = complement(&v0);
    let w = complement(&u0);
    let z = w.dotc(&(m * v1));
    let s1 = if s0 > 1e-300 { (m.determinant().norm() / s0).min(s0) } else { 0.0 };
    let u1 = if z.norm() > 0.0 { w * (z / z.norm()) } else { w };
    (
        Mat2::from_columns(&[u0, u1]),
        [s0, s1],
        Mat2::from_columns(&[v0, v1]),
    )
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), m.ncols(), |r, col| eig.eigenvectors[(r, order[col])]);
    (values, vectors)
}

/// Eigenvector of the largest eigenvalue of a 2×2 Hermitian matrix.
pub fn dominant_eigenvector(m: &Mat2) -> Vec2 {
    hermitian2_top(m).2
}

/// ZYZ Euler angles `(α, β, γ)` with `u = e^{iδ} R_z(α) R_y(β) R_z(γ)`.
pub fn zyz_angles(u: &Mat2) -> (f64, f64, f64) {
    let det = u.determinant();
    let v = u / det.sqrt();
    let beta = v[(1, 0)].norm().atan2(v[(0, 0)].norm());
    let sum = if v[(0, 0)].norm() > 1e-12 { -v[(0, 0)].arg() } else { 0.0 };
    let diff = if v[(1, 0)].norm() > 1e-12 { v[(1, 0)].arg() } else { 0.0 };
    ((sum + diff) / 2.0, beta, (sum - diff) / 2.0)
}

/// Kronecker product of three 2×2 matrices acting on an 8-vector,
/// qubit 1 most significant.
pub fn apply_local3(ops: &[Mat2; 3], amps: &[C64]) -> Vec<C64> {
    let mut out = amps.to_vec();
    for (q, op) in ops.iter().enumerate() {
        apply_single(&mut out, 3, q, op);
    }
    out
}

/// Applies `op` to zero-based qubit `q` of an `n`-qubit amplitude vector in place.
pub fn apply_single(amps: &mut [C64], n: usize, q: usize, op: &Mat2) {
    let stride = 1usize << (n - 1 - q);
    let dim = amps.len();
    let mut base = 0;
    while base < dim {
        for i in base..base + stride {
            let a0 = amps[i];
            let a1 = amps[i + stride];
            amps[i] = op[(0, 0)] * a0 + op[(0, 1)] * a1;
            amps[i + stride] = op[(1, 0)] * a0 + op[(1, 1)] * a1;
        }
        base += 2 * stride;
    }
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Mat2, b: &Mat2, tol: f64) -> bool {
        (a - b).iter().all(|x| x.norm() < tol)
    }

    #[test]
    fn zyz_reconstructs_up_to_phase() {
        let u = rz_matrix(0.3) * ry_matrix(-1.1) * rz_matrix(2.0) * phase_matrix(0.7);
        let (a, b, g) = zyz_angles(&u);
        let w = rz_matrix(a) * ry_matrix(b) * rz_matrix(g);
        let ph = (w.adjoint() * u).trace() / 2.0;
        assert!((ph.norm() - 1.0).abs() < 1e-12);
        assert!(close(&(w * ph), &u, 1e-12));
    }

    #[test]
    fn zyz_handles_diagonal_and_antidiagonal() {
        for u in [phase_matrix(1.3), ry_matrix(PI / 2.0) * phase_matrix(0.4)] {
            let (a, b, g) = zyz_angles(&u);
            let w = rz_matrix(a) * ry_matrix(b) * rz_matrix(g);
            let ph = (w.adjoint() * u).trace() / 2.0;
            assert!(close(&(w * ph), &u, 1e-12));
        }
    }

    #[test]
    fn svd_of_small_nearly_singular_matrix() {
        // rank one up to rounding, with entries of order 1e-2
        let m = Mat2::new(
            c(0.009534574487345168, 0.0005537356117049641),
            c(0.0016104007663815256, -0.008225613963561182),
            c(0.014534896676249506, 0.012819613481936512),
            c(0.012868721263278805, -0.0111215873413536),
        );
        let (u, s, v) = svd2(&m);
        let d = Mat2::new(c(s[0], 0.0), ZERO, ZERO, c(s[1], 0.0));
        assert!(close(&(u * d * v.adjoint()), &m, 1e-16));
        assert!(close(&(u.adjoint() * u), &Mat2::identity(), 1e-14));
        assert!(s[1] < 1e-14);
    }

    #[test]
    fn svd_descending_and_exact() {
        let m = Mat2::new(c(0.1, 0.2), c(0.9, -0.3), c(0.0, 0.5), c(-0.4, 0.1));
        let (u, s, v) = svd2(&m);
        assert!(s[0] >= s[1]);
        let d = Mat2::new(c(s[0], 0.0), ZERO, ZERO, c(s[1], 0.0));
        assert!(close(&(u * d * v.adjoint()), &m, 1e-12));
    }

    #[test]
    fn align_maps_vector_to_zero() {
        let v = Vec2::new(c(0.3, -0.4), c(0.1, 0.8));
        let w = align_to_zero(&v);
        let r = w * v;
        assert!((r[0] - c(v.norm(), 0.0)).norm() < 1e-14);
        assert!(r[1].norm() < 1e-14);
        assert!(close(&(w * w.adjoint()), &Mat2::identity(), 1e-14));
    }
}
