use super::{finish, Route, SynthOptions, SynthesisResult};
use crate::canonical::schmidt_two_qubit;
use crate::error::{Error, Result};
use crate::gate::{Circuit, Gate};
use crate::linalg::ry_matrix;
use crate::state::PureState;

/// At most one CNOT between two-qubit states, none when their Schmidt
/// angles agree. With both states in Schmidt form,
/// `R_y⁽¹⁾(−φ) CNOT₁₂ R_y⁽¹⁾(φ') (cos φ|00⟩ + sin φ|11⟩) = cos φ'|00⟩ + sin φ'|11⟩`.
pub fn two_qubit_transform(
    source: &PureState,
    target: &PureState,
    opts: &SynthOptions,
) -> Result<SynthesisResult> {
    if source.qubits() != 2 || target.qubits() != 2 {
        return Err(Error::WrongQubitCount { expected: "2", actual: source.qubits().max(target.qubits()) });
    }
    let fs = schmidt_two_qubit(source)?;
    let ft = schmidt_two_qubit(target)?;
    let [us1, us2] = [fs.frame.unitaries[0], fs.frame.unitaries[1]];
    let [ut1, ut2] = [ft.frame.unitaries[0], ft.frame.unitaries[1]];
    let mut circ = Circuit::new();
    if (fs.angle - ft.angle).abs() <= opts.tolerance {
        circ.push_unitary(1, &(ut1 * us1.adjoint()));
        circ.push_unitary(2, &(ut2 * us2.adjoint()));
    } else {
        circ.push_unitary(1, &(ry_matrix(ft.angle) * us1.adjoint()));
        circ.push_unitary(2, &us2.adjoint());
        circ.push(Gate::cnot(1, 2));
        circ.push_unitary(1, &(ut1 * ry_matrix(-fs.angle)));
        circ.push_unitary(2, &ut2);
    }
    finish(source, target, circ, Route::TwoQubit)
}
