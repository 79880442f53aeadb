//! Reductions to `|000⟩`, one CNOT per class step, and their inverses.

use super::{finish, ghz, pair_allowed, template_fit, Route, SynthOptions, SynthesisResult};
use crate::canonical::{
    factor_product, inverse_map, others, pencil_roots, schmidt_two_qubit, slices_along, split_qubit,
    tangle, two_term_decomposition, w_form, PencilRoots, ProductTerm, TANGLE_THRESHOLD,
};
use crate::classifier::{classify_from_zero, Reference, StateClass, Witness};
use crate::error::{Error, Result};
use crate::gate::{Circuit, Gate};
use crate::linalg::{align_to_zero, dominant_eigenvector, phase_matrix, ry_matrix, Mat2, Vec2, C64};
use crate::optimize::Pattern;
use crate::state::PureState;
use std::f64::consts::FRAC_PI_4;

const PERMUTATIONS: [[usize; 3]; 6] = [[1, 2, 3], [1, 3, 2], [2, 1, 3], [2, 3, 1], [3, 1, 2], [3, 2, 1]];

#[derive(Debug, Clone)]
enum Stage {
    Three,
    /// Two product terms; `orthogonal` lists qubits whose factors are orthogonal.
    Two { orthogonal: Vec<usize>, terms: [ProductTerm; 2] },
    One { separable: usize },
    Zero,
}

fn basis_vector(bit: usize) -> Vec2 {
    if bit == 0 {
        Vec2::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0))
    } else {
        Vec2::new(C64::new(0.0, 0.0), C64::new(1.0, 0.0))
    }
}

/// Product terms of a state whose qubit-`k` slices are each rank one.
fn terms_along(state: &PureState, k: usize) -> [ProductTerm; 2] {
    let slices = slices_along(state, k);
    let (i, j) = others(k);
    [0, 1].map(|b| {
        let (scale, u, v) = factor_product(&slices[b]);
        let mut factors = [basis_vector(0); 3];
        factors[k - 1] = basis_vector(b);
        factors[i - 1] = u;
        factors[j - 1] = v;
        ProductTerm { coefficient: scale, factors }
    })
}

fn orthogonal_qubits(terms: &[ProductTerm; 2], tol: f64) -> Vec<usize> {
    let mut list: Vec<(usize, f64)> = (1..=3)
        .map(|k| (k, terms[0].factors[k - 1].dotc(&terms[1].factors[k - 1]).norm()))
        .filter(|&(_, o)| o <= tol)
        .collect();
    list.sort_by(|a, b| a.1.total_cmp(&b.1));
    list.into_iter().map(|(k, _)| k).collect()
}

/// Phase on the second basis state making `z` real up to a global phase,
/// and the resulting angle `atan2(|z₁|, |z₀|)`.
fn realify(z: &Vec2) -> (Mat2, f64) {
    let fix = if z[0].norm() > 1e-12 {
        phase_matrix(z[0].arg() - z[1].arg())
    } else {
        phase_matrix(-z[1].arg())
    };
    (fix, z[1].norm().atan2(z[0].norm()))
}

/// Rotation on `m` then `CNOT(k, m)` that makes qubit `m` separable when the
/// two terms have orthogonal factors on `k`.
fn class2_step(terms: &[ProductTerm; 2], k: usize, m: usize) -> Circuit {
    let wk = align_to_zero(&terms[0].factors[k - 1]);
    let wm = align_to_zero(&terms[0].factors[m - 1]);
    let (fix, g) = realify(&(wm * terms[1].factors[m - 1]));
    let mut circ = Circuit::new();
    circ.push_unitary(k, &wk);
    circ.push_unitary(m, &(ry_matrix(FRAC_PI_4 - g / 2.0) * fix * wm));
    circ.push(Gate::cnot(k, m));
    circ
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum PairCnot {
    Forward,
    Backward,
    /// `CNOT₁₂ CNOT₂₃ CNOT₁₂`, equal to `CNOT₁₃` while qubit 2 is `|0⟩`.
    Bridge,
}

fn class1_step(state: &PureState, separable: usize, variant: PairCnot) -> Result<Circuit> {
    let (a, pair) = split_qubit(state, separable);
    let (i, j) = others(separable);
    let form = schmidt_two_qubit(&pair)?;
    let mut circ = Circuit::new();
    circ.push_unitary(i, &form.frame.unitaries[0].adjoint());
    circ.push_unitary(j, &form.frame.unitaries[1].adjoint());
    match variant {
        PairCnot::Forward => circ.push(Gate::cnot(i, j)),
        PairCnot::Backward => circ.push(Gate::cnot(j, i)),
        PairCnot::Bridge => {
            circ.push_unitary(separable, &align_to_zero(&a));
            for g in [Gate::cnot(i, separable), Gate::cnot(separable, j), Gate::cnot(i, separable)] {
                circ.push(g);
            }
        }
    }
    Ok(circ)
}

fn product_alignment(state: &PureState) -> Circuit {
    let mut circ = Circuit::new();
    for q in 1..=3 {
        let v = dominant_eigenvector(&state.single_qubit_density(q));
        circ.push_unitary(q, &align_to_zero(&v));
    }
    circ
}

/// The generic GHZ-type step in the frame `s → 1, c → 2, t → 3`: choose
/// qubit 1's basis so that one branch is a product, then fold the other
/// branch onto a common qubit-3 factor with `R_y` and `CNOT₂₃`.
fn ghz_type_step(state: &PureState, map: &[usize; 3], root: usize) -> Option<Circuit> {
    let perm = state.permute(map);
    let [t0, t1] = perm.slices();
    let (x, y) = match (pencil_roots(&t0, &t1, 0.0), root) {
        (PencilRoots::Two(r), i) => r[i],
        (PencilRoots::Double(r), 0) => r,
        _ => return None,
    };
    let w1 = align_to_zero(&Vec2::new(x.conj(), y.conj()));
    let branch0 = t0 * w1[(0, 0)] + t1 * w1[(0, 1)];
    let branch1 = t0 * w1[(1, 0)] + t1 * w1[(1, 1)];
    let (_, pc, _) = factor_product(&branch0);
    let wc = align_to_zero(&pc);
    let rows = wc * branch1;
    let delta = Vec2::new(rows[(0, 0)], rows[(0, 1)]);
    let delta_p = Vec2::new(rows[(1, 0)], rows[(1, 1)]);
    let wt = if delta.norm() > 1e-12 { align_to_zero(&delta) } else { Mat2::identity() };
    let (fix, g) = realify(&(wt * delta_p));
    let mut circ = Circuit::new();
    circ.push_unitary(1, &w1);
    circ.push_unitary(2, &wc);
    circ.push_unitary(3, &(ry_matrix(FRAC_PI_4 - g / 2.0) * fix * wt));
    circ.push(Gate::cnot(2, 3));
    Some(circ.relabel(&inverse_map(map)))
}

/// `CNOT₂₃` on the W-form frame of the state relabeled by `map`.
fn w_type_step(state: &PureState, map: &[usize; 3]) -> Option<Circuit> {
    let form = w_form(&state.permute(map)).ok()?;
    let mut circ = form.frame.to_canonical_circuit();
    circ.push(Gate::cnot(2, 3));
    Some(circ.relabel(&inverse_map(map)))
}

struct Search<'a> {
    opts: &'a SynthOptions,
    exhaustive: bool,
    best: Option<Circuit>,
}

impl Search<'_> {
    fn candidates(&self, state: &PureState, stage: &Stage) -> Vec<(Circuit, Stage)> {
        let mut out = Vec::new();
        match stage {
            Stage::Three => {
                let ghz_like = tangle(state).map(|t| t > TANGLE_THRESHOLD).unwrap_or(true);
                let mut ghz_steps = Vec::new();
                for s in 1..=3 {
                    let (c, t) = others(s);
                    for (c, t) in [(c, t), (t, c)] {
                        let mut map = [0; 3];
                        map[s - 1] = 1;
                        map[c - 1] = 2;
                        map[t - 1] = 3;
                        for root in 0..2 {
                            if let Some(circ) = ghz_type_step(state, &map, root) {
                                ghz_steps.push((circ, s));
                            }
                        }
                    }
                }
                let mut w_steps = Vec::new();
                for map in &PERMUTATIONS {
                    if let Some(circ) = w_type_step(state, map) {
                        w_steps.push((circ, inverse_map(map)[2]));
                    }
                }
                let ordered = if ghz_like { [ghz_steps, w_steps] } else { [w_steps, ghz_steps] };
                for (circ, orth) in ordered.into_iter().flatten() {
                    if let Ok(next) = state.apply_circuit(&circ) {
                        let terms = terms_along(&next, orth);
                        out.push((circ, Stage::Two { orthogonal: vec![orth], terms }));
                    }
                }
            }
            Stage::Two { orthogonal, terms } => {
                for &k in orthogonal {
                    let (i, j) = others(k);
                    for m in [i, j] {
                        out.push((class2_step(terms, k, m), Stage::One { separable: m }));
                    }
                }
            }
            Stage::One { separable } => {
                let mut variants = vec![PairCnot::Forward, PairCnot::Backward];
                if self.opts.nearest_neighbor && *separable == 2 {
                    variants.push(PairCnot::Bridge);
                }
                for v in variants {
                    if let Ok(circ) = class1_step(state, *separable, v) {
                        out.push((circ, Stage::Zero));
                    }
                }
            }
            Stage::Zero => {}
        }
        out.retain(|(c, _)| c.cnot_pairs().into_iter().all(|p| pair_allowed(p, self.opts)));
        out
    }

    fn done(&self) -> bool {
        !self.exhaustive && self.best.is_some()
    }

    fn run(&mut self, state: &PureState, stage: Stage, acc: Circuit) {
        if self.done() {
            return;
        }
        if let Some(best) = &self.best {
            if acc.cnot_count() >= best.cnot_count() {
                return;
            }
        }
        if let Stage::Zero = stage {
            let full = acc.then(&product_alignment(state));
            let end = state.apply_circuit(&product_alignment(state));
            if end.and_then(|s| s.fidelity(&PureState::zero(3))).unwrap_or(0.0) >= super::FIDELITY_FLOOR {
                self.best = Some(full);
            }
            return;
        }
        for (circ, next) in self.candidates(state, &stage) {
            let Ok(after) = state.apply_circuit(&circ) else { continue };
            self.run(&after, next, acc.clone().then(&circ));
            if self.done() {
                return;
            }
        }
    }
}

fn initial_stage(state: &PureState, class: &StateClass, tol: f64) -> Result<Stage> {
    Ok(match (&class.witness, class.class_index) {
        (_, 0) => Stage::Zero,
        (Witness::Biseparable { separable, .. }, 1) => Stage::One { separable: *separable },
        (Witness::TwoTerm { .. }, 2) => {
            let terms = two_term_decomposition(state)?;
            let mut orthogonal = orthogonal_qubits(&terms, 10.0 * tol);
            if orthogonal.is_empty() {
                return Err(Error::InvalidWitness("two-term witness without orthogonal factors"));
            }
            if let Witness::TwoTerm { orthogonal: k, .. } = class.witness {
                orthogonal.retain(|&q| q != k);
                orthogonal.insert(0, k);
            }
            Stage::Two { orthogonal, terms }
        }
        (_, 3) => Stage::Three,
        _ => return Err(Error::InvalidWitness("witness does not match its class")),
    })
}

/// Gates `R` with `R|ψ⟩ ∝ |000⟩`, or `None` when no constructive route
/// meets the options.
fn reduction(state: &PureState, class: &StateClass, opts: &SynthOptions) -> Result<Option<Circuit>> {
    let stage = initial_stage(state, class, opts.tolerance)?;
    let mut search = Search { opts, exhaustive: opts.nearest_neighbor, best: None };
    search.run(state, stage, Circuit::new());
    Ok(search.best)
}

/// One class-lowering step toward `|000⟩`: a fragment with one CNOT and the
/// resulting state, whose class is one below the witness's.
pub fn reduce_step_zero(state: &PureState, witness: &StateClass) -> Result<(Circuit, PureState)> {
    if witness.reference != Reference::Zero {
        return Err(Error::InvalidWitness("witness is relative to GHZ"));
    }
    if witness.class_index == 0 {
        return Err(Error::InvalidWitness("class 0 has no reduction step"));
    }
    let tol = crate::canonical::DEFAULT_TOLERANCE;
    let current = classify_from_zero(state, tol)?;
    if current.class_index != witness.class_index {
        return Err(Error::InvalidWitness("witness class differs from the state's class"));
    }
    let opts = SynthOptions::default();
    let search = Search { opts: &opts, exhaustive: false, best: None };
    for (circ, _) in search.candidates(state, &initial_stage(state, witness, tol)?) {
        let next = state.apply_circuit(&circ)?;
        if circ.cnot_count() == 1 && classify_from_zero(&next, tol)?.class_index + 1 == witness.class_index {
            return Ok((circ, next));
        }
    }
    Err(Error::InvalidWitness("no step lowered the class"))
}

/// All CNOT patterns of length `k` over the allowed pairs, in a fixed order.
pub(crate) fn patterns(k: usize, opts: &SynthOptions) -> Vec<Pattern> {
    let pairs: Vec<(usize, usize)> = [(1, 2), (1, 3), (2, 1), (2, 3), (3, 1), (3, 2)]
        .into_iter()
        .filter(|&p| pair_allowed(p, opts))
        .collect();
    let mut out: Vec<Pattern> = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|p| pairs.iter().map(move |&q| p.iter().cloned().chain([q]).collect()))
            .collect();
    }
    out
}

/// `|000⟩ → target` with as many CNOTs as the target's class (one more at
/// most under the nearest-neighbor constraint).
pub fn prepare_from_zero(target: &PureState, opts: &SynthOptions) -> Result<SynthesisResult> {
    let zero = PureState::zero(3);
    let class = classify_from_zero(target, opts.tolerance)?;
    let mut best: Option<SynthesisResult> = None;
    if let Some(red) = reduction(target, &class, opts)? {
        if let Ok(r) = finish(&zero, target, red.invert(), Route::ZeroReduction) {
            best = Some(r);
        }
    }
    if opts.nearest_neighbor && best.as_ref().is_none_or(|b| b.cnot_count > class.class_index) {
        // through GHZ: |000⟩ → GHZ on the line, then the GHZ route
        if let Ok(via) = ghz::prepare_from_ghz(target, opts) {
            let mut circ = Circuit::from_gates(vec![Gate::ry(1, FRAC_PI_4), Gate::cnot(1, 2), Gate::cnot(2, 3)]);
            circ.append(&via.circuit);
            if let Ok(r) = finish(&zero, target, circ, Route::Composite) {
                if best.as_ref().is_none_or(|b| r.cnot_count < b.cnot_count) {
                    best = Some(r);
                }
            }
        }
    }
    if let Some(r) = best {
        return Ok(r);
    }
    let mut last = Error::VerificationFailed { fidelity: 0.0 };
    let extra = usize::from(opts.nearest_neighbor);
    for k in class.class_index..=class.class_index + extra {
        for pattern in patterns(k, opts) {
            match template_fit(&zero, target, &pattern, opts) {
                Ok(r) => return Ok(r),
                Err(e) => last = e,
            }
        }
    }
    Err(last)
}
