use super::LocalFrame;
use crate::error::{Error, Result};
use crate::linalg::{svd2, Mat2};
use crate::state::PureState;

/// `ψ = e^{iγ} (U₁ ⊗ U₂)(cos φ|00⟩ + sin φ|11⟩)` with `φ ∈ [0, π/4]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtForm {
    pub angle: f64,
    pub frame: LocalFrame,
}

impl SchmidtForm {
    pub fn canonical_state(&self) -> PureState {
        PureState::two_qubit_schmidt(self.angle)
    }

    pub fn reconstruct(&self) -> PureState {
        self.frame.apply(&self.canonical_state())
    }
}

/// Schmidt angle and frame of a 2×2 amplitude matrix `m` (rows: first
/// qubit): `m = U diag(cos φ, sin φ) V^T` up to normalization, returned as
/// `(φ, U, V)`, so the state is `(U ⊗ V)(cos φ|00⟩ + sin φ|11⟩)`.
pub fn schmidt_of_matrix(m: &Mat2) -> (f64, Mat2, Mat2) {
    let (u, s, v) = svd2(m);
    let angle = s[1].atan2(s[0]);
    (angle, u, v.map(|z| z.conj()))
}

pub fn schmidt_two_qubit(state: &PureState) -> Result<SchmidtForm> {
    if state.qubits() != 2 {
        return Err(Error::WrongQubitCount { expected: "2", actual: state.qubits() });
    }
    let a = state.amplitudes();
    let (angle, u, v) = schmidt_of_matrix(&Mat2::new(a[0], a[1], a[2], a[3]));
    let canonical = PureState::two_qubit_schmidt(angle);
    let forward = [u.adjoint(), v.adjoint()];
    let frame = LocalFrame::from_forward(&forward, &canonical, state);
    Ok(SchmidtForm { angle, frame })
}
