use thiserror::Error;

/// Errors raised by state manipulation, canonical forms and synthesis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("qubit {qubit} out of range for a {qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, qubits: usize },

    #[error("CNOT control and target are both qubit {0}")]
    SameControlTarget(usize),

    #[error("dimension mismatch: expected {expected} amplitudes, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("unsupported qubit count {actual} (expected {expected})")]
    WrongQubitCount { expected: &'static str, actual: usize },

    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),

    #[error("invalid qubit subset {0:?}")]
    BadSubset(Vec<usize>),

    #[error("two-qubit vectors are linearly dependent")]
    DependentInputs,

    #[error("state is not a genuinely tripartite W-type state: {0}")]
    NotWType(&'static str),

    #[error("state is not GHZ-type: {0}")]
    NotGhzType(&'static str),

    #[error("state has no single-qubit purity equal to 1/2 or is GHZ itself: {0}")]
    NotInClass(&'static str),

    #[error("angle formula degenerate: {0}")]
    DegenerateAngles(&'static str),

    #[error("argument outside the domain of {0}")]
    Domain(&'static str),

    #[error("class witness does not match the state: {0}")]
    InvalidWitness(&'static str),

    #[error("optimizer did not converge (best infidelity {best_infidelity:e})")]
    ConvergenceFailure { best_infidelity: f64 },

    #[error("emitted circuit failed verification (fidelity {fidelity})")]
    VerificationFailed { fidelity: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
