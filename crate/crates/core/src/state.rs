//! Exact statevectors for two and three qubits.
//!
//! Amplitude index `i` encodes the bit string `b₁b₂…bₙ` with qubit 1 as the
//! most significant bit. Global phase is kept as-is; comparisons go through
//! [`PureState::fidelity`] or canonical forms.

use crate::error::{Error, Result};
use crate::gate::{Circuit, Gate};
use crate::linalg::{apply_single, c, inner, norm_sqr, Mat2, Vec2, C64, ZERO};
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::FRAC_1_SQRT_2;

/// Relative slack accepted by [`PureState::new`] before renormalizing.
const NORM_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    qubits: usize,
    amps: Vec<C64>,
}

fn check_qubits(qubits: usize) -> Result<()> {
    if qubits == 2 || qubits == 3 {
        Ok(())
    } else {
        Err(Error::WrongQubitCount { expected: "2 or 3", actual: qubits })
    }
}

impl PureState {
    /// Builds a state from amplitudes whose norm is already 1 (to 1e-10);
    /// the stored vector is renormalized exactly.
    pub fn new(qubits: usize, amps: Vec<C64>) -> Result<Self> {
        let n2 = Self::check_shape(qubits, &amps)?;
        if (n2 - 1.0).abs() > NORM_SLACK {
            return Err(Error::NotNormalized(n2));
        }
        Ok(Self::rescaled(qubits, amps, n2))
    }

    /// Builds a state from any nonzero vector by normalizing it.
    pub fn from_unnormalized(qubits: usize, amps: Vec<C64>) -> Result<Self> {
        let n2 = Self::check_shape(qubits, &amps)?;
        if !(n2 > 0.0) || !n2.is_finite() {
            return Err(Error::NotNormalized(n2));
        }
        Ok(Self::rescaled(qubits, amps, n2))
    }

    fn check_shape(qubits: usize, amps: &[C64]) -> Result<f64> {
        check_qubits(qubits)?;
        let expected = 1 << qubits;
        if amps.len() != expected {
            return Err(Error::DimensionMismatch { expected, actual: amps.len() });
        }
        Ok(norm_sqr(amps))
    }

    fn rescaled(qubits: usize, mut amps: Vec<C64>, n2: f64) -> Self {
        // leave vectors normalized to rounding untouched so documents round-trip
        if (n2 - 1.0).abs() <= 8.0 * f64::EPSILON {
            return PureState { qubits, amps };
        }
        let inv = 1.0 / n2.sqrt();
        amps.iter_mut().for_each(|a| *a *= inv);
        PureState { qubits, amps }
    }

    pub fn basis(qubits: usize, index: usize) -> Self {
        let mut amps = vec![ZERO; 1 << qubits];
        amps[index] = c(1.0, 0.0);
        PureState { qubits, amps }
    }

    /// `|0…0⟩`
    pub fn zero(qubits: usize) -> Self {
        Self::basis(qubits, 0)
    }

    /// `(|000⟩ + |111⟩)/√2`
    pub fn ghz() -> Self {
        let mut amps = vec![ZERO; 8];
        amps[0] = c(FRAC_1_SQRT_2, 0.0);
        amps[7] = c(FRAC_1_SQRT_2, 0.0);
        PureState { qubits: 3, amps }
    }

    /// `(|100⟩ + |010⟩ + |001⟩)/√3`
    pub fn w() -> Self {
        let s = 1.0 / 3f64.sqrt();
        let mut amps = vec![ZERO; 8];
        for i in [1, 2, 4] {
            amps[i] = c(s, 0.0);
        }
        PureState { qubits: 3, amps }
    }

    /// `(|00⟩ + |11⟩)/√2`
    pub fn bell() -> Self {
        Self::two_qubit_schmidt(std::f64::consts::FRAC_PI_4)
    }

    /// `cos φ|00⟩ + sin φ|11⟩`
    pub fn two_qubit_schmidt(angle: f64) -> Self {
        let mut amps = vec![ZERO; 4];
        amps[0] = c(angle.cos(), 0.0);
        amps[3] = c(angle.sin(), 0.0);
        PureState { qubits: 2, amps }
    }

    /// Tensor product of normalized single-qubit factors, qubit 1 first.
    pub fn product(factors: &[Vec2]) -> Result<Self> {
        let mut amps = vec![c(1.0, 0.0)];
        for f in factors {
            amps = amps.iter().flat_map(|a| [a * f[0], a * f[1]]).collect();
        }
        Self::from_unnormalized(factors.len(), amps)
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// Multiplies by a unit-modulus scalar.
    pub fn with_global_phase(&self, angle: f64) -> Self {
        let p = C64::from_polar(1.0, angle);
        PureState { qubits: self.qubits, amps: self.amps.iter().map(|a| a * p).collect() }
    }

    pub fn apply_gate(&self, gate: &Gate) -> Result<Self> {
        gate.validate(self.qubits)?;
        let mut amps = self.amps.clone();
        apply_gate_unchecked(&mut amps, self.qubits, gate);
        Ok(PureState { qubits: self.qubits, amps })
    }

    pub fn apply_circuit(&self, circuit: &Circuit) -> Result<Self> {
        circuit.validate(self.qubits)?;
        let mut amps = self.amps.clone();
        for g in &circuit.gates {
            apply_gate_unchecked(&mut amps, self.qubits, g);
        }
        Ok(PureState { qubits: self.qubits, amps })
    }

    /// Applies `ops[k]` to qubit `k + 1`.
    pub fn apply_local(&self, ops: &[Mat2]) -> Self {
        assert_eq!(ops.len(), self.qubits, "one unitary per qubit");
        let mut amps = self.amps.clone();
        for (q, op) in ops.iter().enumerate() {
            apply_single(&mut amps, self.qubits, q, op);
        }
        PureState { qubits: self.qubits, amps }
    }

    pub fn apply_single(&self, qubit: usize, op: &Mat2) -> Self {
        let mut amps = self.amps.clone();
        apply_single(&mut amps, self.qubits, qubit - 1, op);
        PureState { qubits: self.qubits, amps }
    }

    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.qubits != other.qubits {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: other.dim() });
        }
        Ok(inner(&self.amps, &other.amps))
    }

    /// `|⟨a|b⟩|²`, clamped to `[0, 1]`.
    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr().min(1.0))
    }

    /// Reduced density matrix on the listed qubits (1-based, distinct,
    /// nonempty proper subset). Row index bits follow the order given.
    pub fn reduced_density(&self, subset: &[usize]) -> Result<DMatrix<C64>> {
        let n = self.qubits;
        let mut seen = [false; 4];
        let valid = !subset.is_empty()
            && subset.len() < n
            && subset.iter().all(|&q| {
                let ok = q >= 1 && q <= n && !seen[q];
                if ok {
                    seen[q] = true;
                }
                ok
            });
        if !valid {
            return Err(Error::BadSubset(subset.to_vec()));
        }
        let rest: Vec<usize> = (1..=n).filter(|q| !subset.contains(q)).collect();
        let bit = |i: usize, q: usize| (i >> (n - q)) & 1;
        let ks = subset.len();
        let mut m = DMatrix::from_element(1 << ks, 1 << rest.len(), ZERO);
        for (i, a) in self.amps.iter().enumerate() {
            let s = subset.iter().fold(0, |acc, &q| (acc << 1) | bit(i, q));
            let r = rest.iter().fold(0, |acc, &q| (acc << 1) | bit(i, q));
            m[(s, r)] = *a;
        }
        Ok(&m * m.adjoint())
    }

    /// `ρ_q` as a 2×2 matrix.
    pub fn single_qubit_density(&self, qubit: usize) -> Mat2 {
        let rho = self.reduced_density(&[qubit]).expect("valid qubit");
        Mat2::new(rho[(0, 0)], rho[(0, 1)], rho[(1, 0)], rho[(1, 1)])
    }

    /// Moves qubit `q` to position `map[q - 1]`.
    pub fn permute(&self, map: &[usize]) -> Self {
        let n = self.qubits;
        let mut amps = vec![ZERO; self.dim()];
        for (i, a) in self.amps.iter().enumerate() {
            let mut j = 0;
            for q in 1..=n {
                let b = (i >> (n - q)) & 1;
                j |= b << (n - map[q - 1]);
            }
            amps[j] = *a;
        }
        PureState { qubits: n, amps }
    }

    /// The two qubit-1 slices `ψ[0,·,·]` and `ψ[1,·,·]` of a three-qubit state
    /// as 2×2 matrices indexed by (qubit 2, qubit 3).
    pub fn slices(&self) -> [Mat2; 2] {
        let a = &self.amps;
        [
            Mat2::new(a[0], a[1], a[2], a[3]),
            Mat2::new(a[4], a[5], a[6], a[7]),
        ]
    }
}

/// In-place gate application without validation.
pub(crate) fn apply_gate_unchecked(amps: &mut [C64], n: usize, gate: &Gate) {
    match *gate {
        Gate::Cnot { control, target } => {
            let cbit = 1usize << (n - control);
            let tbit = 1usize << (n - target);
            for i in 0..amps.len() {
                if i & cbit != 0 && i & tbit == 0 {
                    amps.swap(i, i | tbit);
                }
            }
        }
        _ => {
            let (q, m) = gate.single_qubit_matrix().expect("single-qubit gate");
            apply_single(amps, n, q - 1, &m);
        }
    }
}

/// Haar-random pure state, deterministic per seed.
pub fn haar_sample(qubits: usize, seed: u64) -> Result<PureState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    haar_sample_with(qubits, &mut rng)
}

pub fn haar_sample_with<R: rand::Rng + ?Sized>(qubits: usize, rng: &mut R) -> Result<PureState> {
    check_qubits(qubits)?;
    let amps = (0..1usize << qubits)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            c(re, im)
        })
        .collect();
    PureState::from_unnormalized(qubits, amps)
}

/// `|⟨a|b⟩|²`
pub fn fidelity(a: &PureState, b: &PureState) -> Result<f64> {
    a.fidelity(b)
}
