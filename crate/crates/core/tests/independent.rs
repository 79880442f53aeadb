//! Library results checked against straightforward reimplementations:
//! dense-matrix simulation, index-loop partial traces and the
//! Coffman–Kundu–Wootters relation for the tangle.

use approx::assert_abs_diff_eq;
use cnotm_core::canonical::{acin_form, purity_invariants, schmidt_two_qubit, tangle};
use cnotm_core::synth::{prepare_from_ghz, prepare_from_zero, two_qubit_transform, SynthOptions};
use cnotm_core::{haar_sample, Circuit, Gate, PureState};
use nalgebra::{DMatrix, Matrix2, Matrix4};
use num_complex::Complex64 as C;

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

fn gate_matrix(g: &Gate) -> Matrix2<C> {
    let i = C::i();
    match *g {
        Gate::Rx { angle, .. } => {
            let (s, co) = angle.sin_cos();
            Matrix2::new(c(co), -i * s, -i * s, c(co))
        }
        Gate::Ry { angle, .. } => {
            let (s, co) = angle.sin_cos();
            Matrix2::new(c(co), c(-s), c(s), c(co))
        }
        Gate::Rz { angle, .. } => Matrix2::new(C::from_polar(1.0, -angle), c(0.0), c(0.0), C::from_polar(1.0, angle)),
        Gate::Phase { angle, .. } => Matrix2::new(c(1.0), c(0.0), c(0.0), C::from_polar(1.0, angle)),
        Gate::Cnot { .. } => unreachable!(),
    }
}

/// Full `2^n × 2^n` unitary of one gate, qubit 1 most significant.
fn dense(g: &Gate, n: usize) -> DMatrix<C> {
    let dim = 1 << n;
    let bit = |q: usize, idx: usize| (idx >> (n - q)) & 1;
    DMatrix::from_fn(dim, dim, |row, col| match *g {
        Gate::Cnot { control, target } => {
            let flip = bit(control, col);
            let image = col ^ (flip << (n - target));
            c(f64::from(u8::from(row == image)))
        }
        Gate::Rx { qubit, .. } | Gate::Ry { qubit, .. } | Gate::Rz { qubit, .. } | Gate::Phase { qubit, .. } => {
            let others = !(1 << (n - qubit));
            if row & others != col & others {
                return c(0.0);
            }
            gate_matrix(g)[(bit(qubit, row), bit(qubit, col))]
        }
    })
}

fn simulate(circuit: &Circuit, state: &PureState) -> Vec<C> {
    let n = state.qubits();
    let mut u = DMatrix::<C>::identity(1 << n, 1 << n);
    for g in &circuit.gates {
        u = dense(g, n) * u;
    }
    let v = u * nalgebra::DVector::from_column_slice(state.amplitudes());
    v.iter().cloned().collect()
}

fn fidelity(a: &[C], b: &[C]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<C>().norm_sqr()
}

/// Reduced density matrix of a 3-qubit state on the listed qubits, by
/// summing over the complementary indices.
fn reduced(amps: &[C], keep: &[usize]) -> DMatrix<C> {
    let traced: Vec<usize> = (1..=3).filter(|q| !keep.contains(q)).collect();
    let k = keep.len();
    let compose = |kept: usize, rest: usize| {
        let mut idx = 0;
        for (j, &q) in keep.iter().enumerate() {
            idx |= ((kept >> (k - 1 - j)) & 1) << (3 - q);
        }
        for (j, &q) in traced.iter().enumerate() {
            idx |= ((rest >> (traced.len() - 1 - j)) & 1) << (3 - q);
        }
        idx
    };
    DMatrix::from_fn(1 << k, 1 << k, |r, s| {
        (0..1 << traced.len()).map(|t| amps[compose(r, t)] * amps[compose(s, t)].conj()).sum()
    })
}

fn purity(rho: &DMatrix<C>) -> f64 {
    (rho * rho).trace().re
}

/// Wootters concurrence of a two-qubit density matrix of rank at most two,
/// whose two smallest spectral terms vanish exactly.
fn concurrence(rho: &DMatrix<C>) -> f64 {
    let rho = Matrix4::from_fn(|i, j| rho[(i, j)]);
    let yy = Matrix4::from_fn(|i, j| c(if i + j == 3 { if i == 0 || i == 3 { -1.0 } else { 1.0 } } else { 0.0 }));
    let tilde = yy * rho.conjugate() * yy;
    let eig = rho.symmetric_eigen();
    let sqrt_rho = eig.eigenvectors
        * Matrix4::from_diagonal(&eig.eigenvalues.map(|l| c(l.max(0.0).sqrt())))
        * eig.eigenvectors.adjoint();
    let r = sqrt_rho * tilde * sqrt_rho;
    let mut l: Vec<f64> = r.symmetric_eigen().eigenvalues.iter().map(|x| x.max(0.0).sqrt()).collect();
    l.sort_by(|a, b| b.total_cmp(a));
    (l[0] - l[1]).max(0.0)
}

fn random_circuit(seed: u64, n: usize, cnots: usize) -> Circuit {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut c = Circuit::new();
    for layer in 0..=cnots {
        for q in 1..=n {
            c.push(Gate::rz(q, rng.random_range(-3.0..3.0)));
            c.push(Gate::ry(q, rng.random_range(-3.0..3.0)));
            c.push(Gate::rx(q, rng.random_range(-3.0..3.0)));
            c.push(Gate::phase(q, rng.random_range(-3.0..3.0)));
        }
        if layer < cnots {
            let control = rng.random_range(1..=n);
            let target = (control + rng.random_range(0..n - 1)) % n + 1;
            c.push(Gate::cnot(control, target));
        }
    }
    c
}

#[test]
fn simulator_matches_dense_matrices() {
    for seed in 0..40 {
        let n = 2 + (seed as usize % 2);
        let start = haar_sample(n, seed + 100).unwrap();
        let circuit = random_circuit(seed, n, 4);
        let fast = start.apply_circuit(&circuit).unwrap();
        let slow = simulate(&circuit, &start);
        for (a, b) in fast.amplitudes().iter().zip(&slow) {
            assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-12);
            assert_abs_diff_eq!(a.im, b.im, epsilon = 1e-12);
        }
    }
}

#[test]
fn purities_match_partial_traces() {
    for seed in 0..50 {
        let s = haar_sample(3, seed).unwrap();
        let inv = purity_invariants(&s).unwrap();
        for q in 1..=3 {
            assert_abs_diff_eq!(inv.get(q), purity(&reduced(s.amplitudes(), &[q])), epsilon = 1e-12);
        }
    }
}

#[test]
fn tangle_obeys_monogamy_equality() {
    // τ = 4 det ρ₁ − C²(ρ₁₂) − C²(ρ₁₃) for pure three-qubit states
    for seed in 0..50 {
        let s = haar_sample(3, 7000 + seed).unwrap();
        let a = s.amplitudes();
        let r1 = reduced(a, &[1]);
        let det = (r1[(0, 0)] * r1[(1, 1)] - r1[(0, 1)] * r1[(1, 0)]).re;
        let expected = 4.0 * det - concurrence(&reduced(a, &[1, 2])).powi(2) - concurrence(&reduced(a, &[1, 3])).powi(2);
        assert_abs_diff_eq!(tangle(&s).unwrap(), expected, epsilon = 1e-9);
    }
    let w = PureState::w();
    assert_abs_diff_eq!(concurrence(&reduced(w.amplitudes(), &[1, 2])), 2.0 / 3.0, epsilon = 1e-12);
}

#[test]
fn schmidt_angle_matches_reduced_spectrum() {
    for seed in 0..50 {
        let s = haar_sample(2, seed).unwrap();
        let a = s.amplitudes();
        let rho = DMatrix::from_fn(2, 2, |i, j| a[2 * i] * a[2 * j].conj() + a[2 * i + 1] * a[2 * j + 1].conj());
        let p = purity(&rho);
        // eigenvalues cos²φ, sin²φ with purity cos⁴φ + sin⁴φ = 1 − sin²2φ / 2
        let angle = schmidt_two_qubit(&s).unwrap().angle;
        assert_abs_diff_eq!(1.0 - (2.0 * angle).sin().powi(2) / 2.0, p, epsilon = 1e-12);
    }
}

#[test]
fn acin_parameters_reproduce_invariants() {
    for seed in 0..50 {
        let s = haar_sample(3, 300 + seed).unwrap();
        let form = acin_form(&s).unwrap();
        let [l0, l1, l2, l3, l4, phi] = form.parameters();
        let amps: Vec<C> = vec![
            c(l0),
            c(0.0),
            c(0.0),
            c(0.0),
            C::from_polar(l1, phi),
            c(l2),
            c(l3),
            c(l4),
        ];
        for q in 1..=3 {
            assert_abs_diff_eq!(purity(&reduced(&amps, &[q])), purity(&reduced(s.amplitudes(), &[q])), epsilon = 1e-10);
        }
        // |Det| of the canonical form is λ₀²λ₄²
        assert_abs_diff_eq!(4.0 * l0 * l0 * l4 * l4, tangle(&s).unwrap(), epsilon = 1e-10);
    }
}

#[test]
fn synthesized_circuits_verify_densely() {
    let opts = SynthOptions::default();
    for seed in 0..20 {
        let t = haar_sample(3, 900 + seed).unwrap();
        let r = prepare_from_zero(&t, &opts).unwrap();
        assert!(fidelity(&simulate(&r.circuit, &PureState::zero(3)), t.amplitudes()) > 1.0 - 1e-10);
        let r = prepare_from_ghz(&t, &opts).unwrap();
        assert!(fidelity(&simulate(&r.circuit, &PureState::ghz()), t.amplitudes()) > 1.0 - 1e-10);
        let (a, b) = (haar_sample(2, 2 * seed).unwrap(), haar_sample(2, 2 * seed + 1).unwrap());
        let r = two_qubit_transform(&a, &b, &opts).unwrap();
        assert!(fidelity(&simulate(&r.circuit, &a), b.amplitudes()) > 1.0 - 1e-10);
    }
}
