//! Explicit circuits achieving the CNOT counts of the distance classes.
//!
//! Reductions toward a reference state are built constructively and then
//! inverted; every returned circuit is re-simulated before it is handed out.

mod angles;
mod ghz;
mod template;
mod transform;
mod two_qubit;
mod zero;

pub use angles::{
    ghz_class1_angles, ghz_class1_circuit, ghz_half_circuit, ghz_to_half_i1_angles, w_half_circuit,
    w_to_half_i1_angles,
};
pub use ghz::{half_purity_step, prepare_from_ghz};
pub use template::template_fit;
pub use transform::transform_any;
pub use two_qubit::two_qubit_transform;
pub use zero::{prepare_from_zero, reduce_step_zero};

use crate::canonical::DEFAULT_TOLERANCE;
use crate::error::{Error, Result};
use crate::gate::Circuit;
use crate::state::PureState;
use serde::Serialize;

/// Fidelity every emitted circuit must reach.
pub const FIDELITY_FLOOR: f64 = 1.0 - 1e-8;

/// CNOT pairs allowed on a line `1-2-3`.
pub const NEAREST_NEIGHBOR_PAIRS: [(usize, usize); 4] = [(1, 2), (2, 1), (2, 3), (3, 2)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    ZeroReduction,
    GhzRoute,
    TwoQubit,
    Composite,
    TemplateFit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthOptions {
    pub tolerance: f64,
    pub nearest_neighbor: bool,
    pub seed: u64,
    /// Multi-start count for numerical fallbacks.
    pub restarts: usize,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions { tolerance: DEFAULT_TOLERANCE, nearest_neighbor: false, seed: 0, restarts: 20 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisResult {
    pub circuit: Circuit,
    pub source: PureState,
    pub target: PureState,
    pub achieved_fidelity: f64,
    pub cnot_count: usize,
    pub route: Route,
}

/// Every CNOT acts on a nearest-neighbor pair.
pub fn is_nearest_neighbor(circuit: &Circuit) -> bool {
    circuit.cnot_pairs().iter().all(|p| NEAREST_NEIGHBOR_PAIRS.contains(p))
}

pub(crate) fn pair_allowed(pair: (usize, usize), opts: &SynthOptions) -> bool {
    !opts.nearest_neighbor || NEAREST_NEIGHBOR_PAIRS.contains(&pair)
}

/// Simulates `circuit` on `source` and packages the result, failing when
/// the target is not reached.
pub(crate) fn finish(
    source: &PureState,
    target: &PureState,
    circuit: Circuit,
    route: Route,
) -> Result<SynthesisResult> {
    let circuit = circuit.compact();
    let fidelity = source.apply_circuit(&circuit)?.fidelity(target)?;
    if !(fidelity >= FIDELITY_FLOOR) {
        return Err(Error::VerificationFailed { fidelity });
    }
    Ok(SynthesisResult {
        cnot_count: circuit.cnot_count(),
        circuit,
        source: source.clone(),
        target: target.clone(),
        achieved_fidelity: fidelity,
        route,
    })
}

/// Fidelity reached by `circuit` from `source`, or 0 on invalid input.
pub(crate) fn reached(source: &PureState, circuit: &Circuit, target: &PureState) -> f64 {
    source
        .apply_circuit(circuit)
        .and_then(|s| s.fidelity(target))
        .unwrap_or(0.0)
}
