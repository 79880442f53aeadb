//! Arbitrary state-to-state transformations through a hub state.

use super::ghz::prepare_from_ghz;
use super::zero::prepare_from_zero;
use super::{finish, two_qubit_transform, Route, SynthOptions, SynthesisResult};
use crate::canonical::lu_equivalent;
use crate::error::{Error, Result};
use crate::state::PureState;

/// `source → target` with at most four CNOTs: the cheapest of a direct
/// local map, a detour through GHZ and a detour through `|000⟩`.
pub fn transform_any(source: &PureState, target: &PureState, opts: &SynthOptions) -> Result<SynthesisResult> {
    if source.qubits() != target.qubits() {
        return Err(Error::DimensionMismatch { expected: source.dim(), actual: target.dim() });
    }
    if source.qubits() == 2 {
        return two_qubit_transform(source, target, opts);
    }
    if source.qubits() != 3 {
        return Err(Error::WrongQubitCount { expected: "2 or 3", actual: source.qubits() });
    }
    if let Some(map) = lu_equivalent(source, target, opts.tolerance)? {
        if let Ok(r) = finish(source, target, map.circuit(), Route::Composite) {
            return Ok(r);
        }
    }
    let mut best: Option<SynthesisResult> = None;
    let mut last = Error::VerificationFailed { fidelity: 0.0 };
    let hubs: [fn(&PureState, &SynthOptions) -> Result<SynthesisResult>; 2] = [prepare_from_ghz, prepare_from_zero];
    for hub in hubs {
        let (from, to) = match (hub(source, opts), hub(target, opts)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => {
                last = e;
                continue;
            }
        };
        if best.as_ref().is_some_and(|b| b.cnot_count <= from.cnot_count + to.cnot_count) {
            continue;
        }
        match finish(source, target, from.circuit.invert().then(&to.circuit), Route::Composite) {
            Ok(r) => best = Some(r),
            Err(e) => last = e,
        }
    }
    best.ok_or(last)
}
