//! Local-unitary canonical forms and invariants of two- and three-qubit states.

mod acin;
mod ghzform;
mod schmidt;
mod span;
mod wform;

pub use acin::{acin_form, i05_form, i05_form_at, lu_equivalent, AcinForm, I05Form, LuMap};
pub use ghzform::{ghz_form, ghz_form_amplitudes, two_term_decomposition, GhzForm, ProductTerm};
pub use schmidt::{schmidt_of_matrix, schmidt_two_qubit, SchmidtForm};
pub use span::{product_states_in_span, ProductVector, SpanProducts};
pub use wform::{w_form, w_form_state, WForm};

pub(crate) use span::{factor_product, pencil_roots, PencilRoots};

use crate::error::{Error, Result};
use crate::gate::Circuit;
use crate::linalg::{c, dominant_eigenvector, Mat2, Vec2};
use crate::state::PureState;
use serde::Serialize;

/// Default absolute tolerance for "equals" decisions.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

/// Tangle below this value marks a W-type (or separable) state.
pub const TANGLE_THRESHOLD: f64 = 1e-8;

/// Local unitaries and a global phase taking a canonical state to the
/// original one: `ψ = e^{iγ} (U₁ ⊗ U₂ ⊗ …) ψ_canonical`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalFrame {
    pub unitaries: Vec<Mat2>,
    pub global_phase: f64,
}

impl LocalFrame {
    /// Frame from the unitaries `W_k` that map the state onto its canonical
    /// form, with the phase fixed by overlap.
    pub(crate) fn from_forward(forward: &[Mat2], canonical: &PureState, state: &PureState) -> Self {
        let unitaries: Vec<Mat2> = forward.iter().map(|w| w.adjoint()).collect();
        let mut frame = LocalFrame { unitaries, global_phase: 0.0 };
        let rebuilt = frame.apply(canonical);
        frame.global_phase = rebuilt.inner(state).map(|z| z.arg()).unwrap_or(0.0);
        frame
    }

    /// `e^{iγ} (⊗ U_k) canonical`
    pub fn apply(&self, canonical: &PureState) -> PureState {
        canonical.apply_local(&self.unitaries).with_global_phase(self.global_phase)
    }

    /// Gates taking the original state to the canonical one (up to phase).
    pub fn to_canonical_circuit(&self) -> Circuit {
        let inv: Vec<Mat2> = self.unitaries.iter().map(|u| u.adjoint()).collect();
        let mut circ = Circuit::new();
        circ.push_local_layer(&inv);
        circ
    }

    /// Gates taking the canonical state to the original one (up to phase).
    pub fn from_canonical_circuit(&self) -> Circuit {
        let mut circ = Circuit::new();
        circ.push_local_layer(&self.unitaries);
        circ
    }
}

/// Single-qubit purities `I_k = tr ρ_k²` of a three-qubit state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvariantTriple(pub [f64; 3]);

impl InvariantTriple {
    pub fn get(&self, qubit: usize) -> f64 {
        self.0[qubit - 1]
    }
}

pub(crate) fn require_three(state: &PureState) -> Result<()> {
    if state.qubits() == 3 {
        Ok(())
    } else {
        Err(Error::WrongQubitCount { expected: "3", actual: state.qubits() })
    }
}

pub fn purity(rho: &Mat2) -> f64 {
    rho.iter().map(|z| z.norm_sqr()).sum()
}

pub fn purity_invariants(state: &PureState) -> Result<InvariantTriple> {
    require_three(state)?;
    let mut out = [0.0; 3];
    for (k, slot) in out.iter_mut().enumerate() {
        *slot = purity(&state.single_qubit_density(k + 1)).clamp(0.5, 1.0);
    }
    Ok(InvariantTriple(out))
}

/// Three-tangle `4 |Det ψ|`, with `Det` the Cayley hyperdeterminant of the
/// 2×2×2 amplitude tensor.
pub fn tangle(state: &PureState) -> Result<f64> {
    require_three(state)?;
    Ok((4.0 * hyperdeterminant(state.amplitudes()).norm()).min(1.0))
}

pub(crate) fn hyperdeterminant(a: &[num_complex::Complex64]) -> num_complex::Complex64 {
    let [a000, a001, a010, a011, a100, a101, a110, a111] =
        [a[0], a[1], a[2], a[3], a[4], a[5], a[6], a[7]];
    let squares = a000 * a000 * a111 * a111
        + a001 * a001 * a110 * a110
        + a010 * a010 * a101 * a101
        + a100 * a100 * a011 * a011;
    let pairs = a000 * a111 * a011 * a100
        + a000 * a111 * a101 * a010
        + a000 * a111 * a110 * a001
        + a011 * a100 * a101 * a010
        + a011 * a100 * a110 * a001
        + a101 * a010 * a110 * a001;
    let quads = a000 * a110 * a101 * a011 + a111 * a001 * a010 * a100;
    squares - c(2.0, 0.0) * pairs + c(4.0, 0.0) * quads
}

/// Relabeling that moves `qubit` to position 1 and keeps the other two in order.
pub(crate) fn bring_to_front(qubit: usize) -> [usize; 3] {
    match qubit {
        1 => [1, 2, 3],
        2 => [2, 1, 3],
        3 => [2, 3, 1],
        _ => panic!("qubit {qubit} out of range"),
    }
}

/// Qubit-`k` slices of a three-qubit state as 2×2 matrices over the other
/// two qubits (in increasing label order).
pub(crate) fn slices_along(state: &PureState, qubit: usize) -> [Mat2; 2] {
    state.permute(&bring_to_front(qubit)).slices()
}

/// Splits off a (nearly) separable qubit: its dominant reduced state and the
/// normalized state of the remaining pair (in increasing label order).
pub(crate) fn split_qubit(state: &PureState, qubit: usize) -> (Vec2, PureState) {
    let a = dominant_eigenvector(&state.single_qubit_density(qubit));
    let [s0, s1] = slices_along(state, qubit);
    let m = s0 * a[0].conj() + s1 * a[1].conj();
    let pair = PureState::from_unnormalized(2, vec![m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]])
        .unwrap_or_else(|_| PureState::zero(2));
    (a, pair)
}

/// The two labels other than `qubit`, ascending.
pub(crate) fn others(qubit: usize) -> (usize, usize) {
    match qubit {
        1 => (2, 3),
        2 => (1, 3),
        _ => (1, 2),
    }
}

/// Inverse of a qubit relabeling map.
pub fn inverse_map(map: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; map.len()];
    for (q, &p) in map.iter().enumerate() {
        inv[p - 1] = q + 1;
    }
    inv
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::haar_sample;

    #[test]
    fn purity_examples() {
        let ghz = purity_invariants(&PureState::ghz()).unwrap();
        assert!(ghz.0.iter().all(|i| (i - 0.5).abs() < 1e-12));
        let zero = purity_invariants(&PureState::zero(3)).unwrap();
        assert!(zero.0.iter().all(|i| (i - 1.0).abs() < 1e-12));
        // Bell(1,2) ⊗ |0⟩
        let mut amps = vec![c(0.0, 0.0); 8];
        amps[0] = c(1.0, 0.0);
        amps[6] = c(1.0, 0.0);
        let s = PureState::from_unnormalized(3, amps).unwrap();
        let i = purity_invariants(&s).unwrap();
        assert!((i.get(1) - 0.5).abs() < 1e-12 && (i.get(2) - 0.5).abs() < 1e-12);
        assert!((i.get(3) - 1.0).abs() < 1e-12);
        assert!(purity_invariants(&PureState::bell()).is_err());
    }

    #[test]
    fn tangle_known_points() {
        assert!((tangle(&PureState::ghz()).unwrap() - 1.0).abs() < 1e-12);
        assert!(tangle(&PureState::w()).unwrap() < 1e-12);
        assert!(tangle(&PureState::zero(3)).unwrap() < 1e-15);
        assert!(tangle(&PureState::bell()).is_err());
    }

    #[test]
    fn relabel_helpers() {
        for q in 1..=3 {
            let map = bring_to_front(q);
            assert_eq!(map[q - 1], 1);
            let inv = inverse_map(&map);
            let s = haar_sample(3, q as u64).unwrap();
            assert_eq!(s.permute(&map).permute(&inv), s);
        }
    }
}
