//! CNOT-distance classes relative to `|000⟩` (0–3) and GHZ (0–2).

use crate::canonical::{
    self, acin_form, ghz_form, i05_form_at, lu_equivalent, purity_invariants, schmidt_two_qubit,
    split_qubit, tangle, w_form, GhzForm, I05Form, InvariantTriple, LuMap, SchmidtForm, WForm,
    TANGLE_THRESHOLD,
};
use crate::error::{Error, Result};
use crate::linalg::{dominant_eigenvector, Vec2};
use crate::state::PureState;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reference {
    Zero,
    Ghz,
}

/// Data backing a class assignment.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    /// All three qubits separable.
    Product { factors: [Vec2; 3] },
    /// `|a⟩_k ⊗ |χ⟩`, the pair listed in increasing label order.
    Biseparable { separable: usize, factor: Vec2, pair: SchmidtForm },
    /// Two product terms whose factors on `orthogonal` are orthogonal.
    TwoTerm { orthogonal: usize, form: GhzForm },
    WType(WForm),
    GhzType(GhzForm),
    /// Local unitaries taking GHZ to the state.
    GhzEquivalent(LuMap),
    /// A maximally mixed qubit; canonical data of the relabeled state.
    HalfPurity(I05Form),
    /// No single-qubit purity equals 1/2.
    Generic(InvariantTriple),
}

impl Witness {
    /// A state LU-equivalent to the classified one, where the witness
    /// determines it.
    pub fn representative(&self) -> Option<PureState> {
        match self {
            Witness::Product { .. } => Some(PureState::zero(3)),
            Witness::Biseparable { separable, pair, .. } => {
                let s = pair.canonical_state();
                let a = s.amplitudes();
                let mut amps = a.to_vec();
                amps.extend(std::iter::repeat_n(crate::linalg::ZERO, 4));
                // |0⟩ ⊗ pair, then move qubit 1 to `separable`
                let joined = PureState::new(3, amps).ok()?;
                let map = match separable {
                    1 => [1, 2, 3],
                    2 => [2, 1, 3],
                    _ => [3, 1, 2],
                };
                Some(joined.permute(&map))
            }
            Witness::TwoTerm { form, .. } | Witness::GhzType(form) => Some(form.canonical_state()),
            Witness::WType(form) => Some(form.canonical_state()),
            Witness::GhzEquivalent(_) => Some(PureState::ghz()),
            Witness::HalfPurity(form) => {
                let inv = canonical::inverse_map(&form.relabel);
                Some(form.canonical_state().permute(&inv))
            }
            Witness::Generic(_) => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Witness::Product { .. } => "product",
            Witness::Biseparable { .. } => "biseparable",
            Witness::TwoTerm { .. } => "two-term",
            Witness::WType(_) => "w-type",
            Witness::GhzType(_) => "ghz-type",
            Witness::GhzEquivalent(_) => "ghz-equivalent",
            Witness::HalfPurity(_) => "half-purity",
            Witness::Generic(_) => "generic",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateClass {
    pub reference: Reference,
    pub class_index: usize,
    pub witness: Witness,
    /// Distance of the deciding quantity from its threshold side: the
    /// smallest quantity judged nonzero, or for the lowest class the largest
    /// quantity judged zero.
    pub margin: f64,
    pub invariants: InvariantTriple,
    pub tangle: f64,
}

fn most_separable(inv: &InvariantTriple) -> usize {
    (1..=3).max_by(|&a, &b| inv.get(a).total_cmp(&inv.get(b)).then(b.cmp(&a))).expect("three qubits")
}

pub fn classify_from_zero(state: &PureState, tol: f64) -> Result<StateClass> {
    let invariants = purity_invariants(state)?;
    let tau = tangle(state)?;
    let gaps = invariants.0.map(|i| 1.0 - i);
    let separable = gaps.iter().filter(|&&g| g <= tol).count();
    let done = |class_index, witness, margin| {
        Ok(StateClass { reference: Reference::Zero, class_index, witness, margin, invariants, tangle: tau })
    };
    if separable >= 2 {
        let factors = [1, 2, 3].map(|q| dominant_eigenvector(&state.single_qubit_density(q)));
        let margin = gaps.iter().cloned().fold(0.0, f64::max);
        return done(0, Witness::Product { factors }, margin);
    }
    if separable == 1 {
        let k = most_separable(&invariants);
        let (factor, pair_state) = split_qubit(state, k);
        let pair = schmidt_two_qubit(&pair_state)?;
        let margin = gaps.iter().filter(|&&g| g > tol).cloned().fold(f64::INFINITY, f64::min);
        return done(1, Witness::Biseparable { separable: k, factor, pair }, margin);
    }
    let min_gap = gaps.iter().cloned().fold(f64::INFINITY, f64::min);
    if tau > TANGLE_THRESHOLD {
        let form = ghz_form(state)?;
        let cosines = form.phis.map(|p| p.cos().abs());
        let (k, c) = (0..3)
            .map(|i| (i + 1, cosines[i]))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("three qubits");
        if c <= tol {
            return done(2, Witness::TwoTerm { orthogonal: k, form }, min_gap.min(tau));
        }
        return done(3, Witness::GhzType(form), c.min(min_gap).min(tau));
    }
    let form = w_form(state)?;
    done(3, Witness::WType(form), min_gap)
}

pub fn classify_from_ghz(state: &PureState, tol: f64) -> Result<StateClass> {
    let invariants = purity_invariants(state)?;
    let tau = tangle(state)?;
    let done = |class_index, witness, margin| {
        Ok(StateClass { reference: Reference::Ghz, class_index, witness, margin, invariants, tangle: tau })
    };
    let ghz = PureState::ghz();
    if let Some(map) = lu_equivalent(&ghz, state, tol)? {
        let form = acin_form(state)?;
        let reference = acin_form(&ghz)?;
        let dist = form
            .parameters()
            .iter()
            .zip(reference.parameters())
            .map(|(a, b)| (a - b).abs())
            .take(5)
            .fold(0.0, f64::max);
        return done(0, Witness::GhzEquivalent(map), dist);
    }
    let devs = invariants.0.map(|i| (i - 0.5).abs());
    let (k, d) = (0..3)
        .map(|i| (i + 1, devs[i]))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("three qubits");
    if d <= tol {
        let form = i05_form_at(state, k, tol)?;
        let others = devs.iter().cloned().filter(|&v| v > tol).fold(f64::INFINITY, f64::min);
        return done(1, Witness::HalfPurity(form), others);
    }
    done(2, Witness::Generic(invariants), d)
}

pub fn classify(state: &PureState, reference: Reference, tol: f64) -> Result<StateClass> {
    match reference {
        Reference::Zero => classify_from_zero(state, tol),
        Reference::Ghz => classify_from_ghz(state, tol),
    }
}

/// CNOT distance between two-qubit states: 0 when their Schmidt angles
/// agree within `tol`, else 1.
pub fn classify_two_qubit(a: &PureState, b: &PureState, tol: f64) -> Result<usize> {
    if a.qubits() != 2 || b.qubits() != 2 {
        return Err(Error::WrongQubitCount { expected: "2", actual: a.qubits().max(b.qubits()) });
    }
    let (fa, fb) = (schmidt_two_qubit(a)?, schmidt_two_qubit(b)?);
    Ok(usize::from((fa.angle - fb.angle).abs() > tol))
}
