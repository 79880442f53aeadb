//! Five-term canonical form
//! `λ₀|000⟩ + λ₁e^{iφ}|100⟩ + λ₂|101⟩ + λ₃|110⟩ + λ₄|111⟩`
//! and the local-unitary equivalence test built on it.

use super::span::{pencil_roots, PencilRoots};
use super::{
    bring_to_front, purity_invariants, require_three, schmidt_two_qubit, LocalFrame,
    DEFAULT_TOLERANCE,
};
use crate::error::{Error, Result};
use crate::linalg::{
    align_to_zero, c, dominant_eigenvector, phase_matrix, svd2, wrap_angle, Mat2, Vec2, C64, ZERO,
};
use crate::state::PureState;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Amplitudes smaller than this carry no phase information.
const PHASE_EPS: f64 = 1e-12;
/// Window around `[0, π]` accepted for the relative phase.
const PHI_WINDOW: f64 = 1e-9;
/// Rounding grid for the lexicographic tie-break between pencil roots.
const TIE_GRID: f64 = 1e9;

#[derive(Debug, Clone, PartialEq)]
pub struct AcinForm {
    pub lambdas: [f64; 5],
    /// Relative phase on `|100⟩`, in `[0, π]`.
    pub phi: f64,
    pub frame: LocalFrame,
}

impl AcinForm {
    pub fn canonical_state(&self) -> PureState {
        canonical_from_parameters(&self.lambdas, self.phi)
    }

    pub fn reconstruct(&self) -> PureState {
        self.frame.apply(&self.canonical_state())
    }

    /// `(λ₀, λ₁, λ₂, λ₃, λ₄, φ)`
    pub fn parameters(&self) -> [f64; 6] {
        let l = self.lambdas;
        [l[0], l[1], l[2], l[3], l[4], self.phi]
    }

    /// Parameter vectors agree within `tol`; the phase is compared through
    /// `λ₁e^{iφ}` so it is ignored when `λ₁` vanishes.
    pub fn matches(&self, other: &AcinForm, tol: f64) -> bool {
        let close = self.lambdas.iter().zip(&other.lambdas).all(|(a, b)| (a - b).abs() <= tol);
        let z1 = C64::from_polar(self.lambdas[1], self.phi);
        let z2 = C64::from_polar(other.lambdas[1], other.phi);
        close && (z1 - z2).norm() <= tol
    }
}

pub(crate) fn canonical_from_parameters(lambdas: &[f64; 5], phi: f64) -> PureState {
    let mut amps = vec![ZERO; 8];
    amps[0b000] = c(lambdas[0], 0.0);
    amps[0b100] = C64::from_polar(lambdas[1], phi);
    amps[0b101] = c(lambdas[2], 0.0);
    amps[0b110] = c(lambdas[3], 0.0);
    amps[0b111] = c(lambdas[4], 0.0);
    PureState::from_unnormalized(3, amps).expect("nonzero canonical state")
}

/// Builds the candidate form for one choice of qubit-1 basis `w1`.
fn candidate(state: &PureState, w1: Mat2) -> AcinForm {
    let [t0, t1] = state.slices();
    let t0p = t0 * w1[(0, 0)] + t1 * w1[(0, 1)];
    let t1p = t0 * w1[(1, 0)] + t1 * w1[(1, 1)];

    // (A ⊗ B) acts on an amplitude matrix as A M Bᵀ; pick A = U†, Bᵀ = V
    // so that the rank-one T0' becomes λ₀|00⟩.
    let pivot = if t0p.norm() > 1e-14 { t0p } else { t1p };
    let (u, _, v) = svd2(&pivot);
    let w2 = u.adjoint();
    let w3 = v.transpose();
    let t0q = w2 * t0p * v;
    let t1q = w2 * t1p * v;

    let c000 = t0q[(0, 0)];
    let (c100, c101, c110, c111) = (t1q[(0, 0)], t1q[(0, 1)], t1q[(1, 0)], t1q[(1, 1)]);
    let nz = |z: C64| z.norm() > PHASE_EPS;

    // Phases diag(1, e^{ip_k}) on each qubit making c101, c110, c111 real
    // and, where freedom remains, c100 real as well.
    let (p1, p2, p3);
    if nz(c101) && nz(c110) && nz(c111) {
        p1 = c111.arg() - c110.arg() - c101.arg();
        p2 = -c110.arg() - p1;
        p3 = -c101.arg() - p1;
    } else {
        p1 = if nz(c100) { -c100.arg() } else { 0.0 };
        let mut q2 = nz(c110).then(|| -c110.arg() - p1);
        let mut q3 = nz(c101).then(|| -c101.arg() - p1);
        if nz(c111) {
            match (q2, q3) {
                (Some(a), None) => q3 = Some(-c111.arg() - p1 - a),
                (None, Some(b)) => q2 = Some(-c111.arg() - p1 - b),
                (None, None) => {
                    q2 = Some(0.0);
                    q3 = Some(-c111.arg() - p1);
                }
                (Some(_), Some(_)) => {}
            }
        }
        p2 = q2.unwrap_or(0.0);
        p3 = q3.unwrap_or(0.0);
    }
    // c000 is real and nonnegative from the SVD
    let lambdas = [c000.norm(), c100.norm(), c101.norm(), c110.norm(), c111.norm()];
    let phi = if nz(c100) { wrap_angle(c100.arg() + p1) } else { 0.0 };

    let forward = [phase_matrix(p1) * w1, phase_matrix(p2) * w2, phase_matrix(p3) * w3];
    let norm = lambdas.iter().map(|l| l * l).sum::<f64>().sqrt();
    let lambdas = lambdas.map(|l| l / norm);
    let canonical = canonical_from_parameters(&lambdas, phi);
    let frame = LocalFrame::from_forward(&forward, &canonical, state);
    AcinForm { lambdas, phi, frame }
}

fn admissible_phi(phi: f64) -> Option<f64> {
    if (-PHI_WINDOW..=PI).contains(&phi) {
        Some(phi.max(0.0))
    } else if phi <= -PI + PHI_WINDOW {
        Some(PI)
    } else {
        None
    }
}

fn tie_key(form: &AcinForm) -> [i64; 6] {
    form.parameters().map(|x| (x * TIE_GRID).round() as i64)
}

/// Five-term canonical form. Of the (up to two) admissible qubit-1 bases,
/// the one giving `φ ∈ [0, π]` is kept; remaining ties go to the
/// lexicographically smallest parameter vector.
pub fn acin_form(state: &PureState) -> Result<AcinForm> {
    require_three(state)?;
    let [t0, t1] = state.slices();
    let bases: Vec<Mat2> = match pencil_roots(&t0, &t1, 1e-12) {
        PencilRoots::Two(roots) => roots.iter().map(|&(x, y)| basis_from_root(x, y)).collect(),
        PencilRoots::Double((x, y)) => vec![basis_from_root(x, y)],
        PencilRoots::All => {
            let v = dominant_eigenvector(&state.single_qubit_density(1));
            vec![align_to_zero(&v)]
        }
    };
    let mut candidates: Vec<AcinForm> = bases.into_iter().map(|w| candidate(state, w)).collect();
    let any_admissible = candidates.iter().any(|f| admissible_phi(f.phi).is_some());
    if any_admissible {
        candidates.retain(|f| admissible_phi(f.phi).is_some());
    }
    for f in &mut candidates {
        if let Some(p) = admissible_phi(f.phi) {
            f.phi = p;
        }
    }
    let best = candidates
        .into_iter()
        .min_by_key(tie_key)
        .expect("at least one candidate basis");
    Ok(best)
}

/// Qubit-1 unitary whose first row is `(x, y)`.
fn basis_from_root(x: C64, y: C64) -> Mat2 {
    align_to_zero(&Vec2::new(x.conj(), y.conj()))
}

/// Local unitaries taking one state onto another:
/// `b = e^{iγ} (U₁ ⊗ U₂ ⊗ …) a`.
#[derive(Debug, Clone, PartialEq)]
pub struct LuMap {
    pub unitaries: Vec<Mat2>,
    pub global_phase: f64,
}

impl LuMap {
    pub fn apply(&self, state: &PureState) -> PureState {
        state.apply_local(&self.unitaries).with_global_phase(self.global_phase)
    }

    pub fn circuit(&self) -> crate::gate::Circuit {
        let mut circ = crate::gate::Circuit::new();
        circ.push_local_layer(&self.unitaries);
        circ
    }
}

fn compose(from: &LocalFrame, to: &LocalFrame) -> LuMap {
    let unitaries = from
        .unitaries
        .iter()
        .zip(&to.unitaries)
        .map(|(ua, ub)| ub * ua.adjoint())
        .collect();
    LuMap { unitaries, global_phase: to.global_phase - from.global_phase }
}

/// Decides local-unitary equivalence by comparing canonical parameters
/// within `tol`; on success returns the local map from `a` to `b`.
pub fn lu_equivalent(a: &PureState, b: &PureState, tol: f64) -> Result<Option<LuMap>> {
    if a.qubits() != b.qubits() {
        return Err(Error::DimensionMismatch { expected: a.dim(), actual: b.dim() });
    }
    if a.qubits() == 2 {
        let (fa, fb) = (schmidt_two_qubit(a)?, schmidt_two_qubit(b)?);
        if (fa.angle - fb.angle).abs() > tol {
            return Ok(None);
        }
        return Ok(Some(compose(&fa.frame, &fb.frame)));
    }
    let (fa, fb) = (acin_form(a)?, acin_form(b)?);
    if !fa.matches(&fb, tol) {
        return Ok(None);
    }
    Ok(Some(compose(&fa.frame, &fb.frame)))
}

/// Canonical data of a state with one maximally mixed qubit:
/// `(|000⟩/√2 + λ₂|101⟩ + λ₃|110⟩ + λ₄|111⟩)` after moving that qubit to
/// position 1.
#[derive(Debug, Clone, PartialEq)]
pub struct I05Form {
    /// Qubit (1-based, original labels) with `I = 1/2`.
    pub qubit: usize,
    /// Relabeling applied before canonicalizing (`map[q-1]` is the new
    /// position of qubit `q`).
    pub relabel: [usize; 3],
    pub lambda2: f64,
    pub lambda3: f64,
    pub lambda4: f64,
    /// Frame of the relabeled state.
    pub frame: LocalFrame,
}

impl I05Form {
    /// Canonical state in the relabeled frame.
    pub fn canonical_state(&self) -> PureState {
        canonical_from_parameters(&[FRAC_1_SQRT_2, 0.0, self.lambda2, self.lambda3, self.lambda4], 0.0)
    }
}

pub fn i05_form(state: &PureState, tol: f64) -> Result<I05Form> {
    let inv = purity_invariants(state)?;
    let (qubit, dev) = (1..=3)
        .map(|k| (k, (inv.get(k) - 0.5).abs()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("three qubits");
    if dev > tol {
        return Err(Error::NotInClass("no single-qubit purity equals 1/2"));
    }
    i05_form_at(state, qubit, tol)
}

/// Like [`i05_form`] with the maximally mixed qubit given explicitly.
pub fn i05_form_at(state: &PureState, qubit: usize, tol: f64) -> Result<I05Form> {
    let inv = purity_invariants(state)?;
    if !(1..=3).contains(&qubit) {
        return Err(Error::QubitOutOfRange { qubit, qubits: 3 });
    }
    if (inv.get(qubit) - 0.5).abs() > tol {
        return Err(Error::NotInClass("purity of the chosen qubit is not 1/2"));
    }
    if lu_equivalent(state, &PureState::ghz(), tol.max(DEFAULT_TOLERANCE))?.is_some() {
        return Err(Error::NotInClass("state is LU-equivalent to GHZ"));
    }
    let relabel = bring_to_front(qubit);
    let form = acin_form(&state.permute(&relabel))?;
    let l = form.lambdas;
    // λ₁ grows like the square root of the purity deviation
    let bound = 10.0 * tol.sqrt();
    if (l[0] - FRAC_1_SQRT_2).abs() > bound || l[1] > bound {
        return Err(Error::InvalidWitness("maximally mixed qubit did not give λ₀ = 1/√2, λ₁ = 0"));
    }
    Ok(I05Form { qubit, relabel, lambda2: l[2], lambda3: l[3], lambda4: l[4], frame: form.frame })
}
