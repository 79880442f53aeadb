//! Gates and circuits. Qubits are labelled from 1, qubit 1 leftmost.

use crate::error::{Error, Result};
use crate::linalg::{phase_matrix, rx_matrix, ry_matrix, rz_matrix, zyz_angles, Mat2};
use std::f64::consts::PI;

/// Angles below this magnitude are dropped when a unitary is lowered to gates.
const NEGLIGIBLE_ANGLE: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    Rx { qubit: usize, angle: f64 },
    Ry { qubit: usize, angle: f64 },
    Rz { qubit: usize, angle: f64 },
    Phase { qubit: usize, angle: f64 },
    Cnot { control: usize, target: usize },
}

impl Gate {
    pub fn rx(qubit: usize, angle: f64) -> Self {
        Gate::Rx { qubit, angle }
    }
    pub fn ry(qubit: usize, angle: f64) -> Self {
        Gate::Ry { qubit, angle }
    }
    pub fn rz(qubit: usize, angle: f64) -> Self {
        Gate::Rz { qubit, angle }
    }
    pub fn phase(qubit: usize, angle: f64) -> Self {
        Gate::Phase { qubit, angle }
    }
    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::Cnot { control, target }
    }

    pub fn is_cnot(&self) -> bool {
        matches!(self, Gate::Cnot { .. })
    }

    /// Checks qubit labels against a register of `qubits` qubits.
    pub fn validate(&self, qubits: usize) -> Result<()> {
        let check = |q: usize| {
            if q == 0 || q > qubits {
                Err(Error::QubitOutOfRange { qubit: q, qubits })
            } else {
                Ok(())
            }
        };
        match *self {
            Gate::Cnot { control, target } => {
                check(control)?;
                check(target)?;
                if control == target {
                    return Err(Error::SameControlTarget(control));
                }
                Ok(())
            }
            Gate::Rx { qubit, .. }
            | Gate::Ry { qubit, .. }
            | Gate::Rz { qubit, .. }
            | Gate::Phase { qubit, .. } => check(qubit),
        }
    }

    /// Largest qubit label the gate touches.
    pub fn max_qubit(&self) -> usize {
        match *self {
            Gate::Rx { qubit, .. } | Gate::Ry { qubit, .. } | Gate::Rz { qubit, .. } | Gate::Phase { qubit, .. } => qubit,
            Gate::Cnot { control, target } => control.max(target),
        }
    }

    pub fn inverse(&self) -> Self {
        match *self {
            Gate::Rx { qubit, angle } => Gate::Rx { qubit, angle: -angle },
            Gate::Ry { qubit, angle } => Gate::Ry { qubit, angle: -angle },
            Gate::Rz { qubit, angle } => Gate::Rz { qubit, angle: -angle },
            Gate::Phase { qubit, angle } => Gate::Phase { qubit, angle: -angle },
            cnot @ Gate::Cnot { .. } => cnot,
        }
    }

    /// 2×2 matrix and qubit of a single-qubit gate; `None` for CNOT.
    pub fn single_qubit_matrix(&self) -> Option<(usize, Mat2)> {
        match *self {
            Gate::Rx { qubit, angle } => Some((qubit, rx_matrix(angle))),
            Gate::Ry { qubit, angle } => Some((qubit, ry_matrix(angle))),
            Gate::Rz { qubit, angle } => Some((qubit, rz_matrix(angle))),
            Gate::Phase { qubit, angle } => Some((qubit, phase_matrix(angle))),
            Gate::Cnot { .. } => None,
        }
    }

    /// Renames qubits: label `q` becomes `map[q - 1]`.
    pub fn relabel(&self, map: &[usize]) -> Self {
        let m = |q: usize| map[q - 1];
        match *self {
            Gate::Rx { qubit, angle } => Gate::Rx { qubit: m(qubit), angle },
            Gate::Ry { qubit, angle } => Gate::Ry { qubit: m(qubit), angle },
            Gate::Rz { qubit, angle } => Gate::Rz { qubit: m(qubit), angle },
            Gate::Phase { qubit, angle } => Gate::Phase { qubit: m(qubit), angle },
            Gate::Cnot { control, target } => Gate::Cnot { control: m(control), target: m(target) },
        }
    }
}

/// Ordered gate list; the first gate is applied first.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Circuit {
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_gates(gates: Vec<Gate>) -> Self {
        Circuit { gates }
    }

    pub fn push(&mut self, gate: Gate) {
        self.gates.push(gate);
    }

    pub fn append(&mut self, other: &Circuit) {
        self.gates.extend_from_slice(&other.gates);
    }

    /// `self` followed by `other`.
    pub fn then(mut self, other: &Circuit) -> Self {
        self.append(other);
        self
    }

    pub fn cnot_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_cnot()).count()
    }

    pub fn cnot_pairs(&self) -> Vec<(usize, usize)> {
        self.gates
            .iter()
            .filter_map(|g| match *g {
                Gate::Cnot { control, target } => Some((control, target)),
                _ => None,
            })
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn validate(&self, qubits: usize) -> Result<()> {
        self.gates.iter().try_for_each(|g| g.validate(qubits))
    }

    /// Reversed order with every gate inverted.
    pub fn invert(&self) -> Circuit {
        Circuit { gates: self.gates.iter().rev().map(Gate::inverse).collect() }
    }

    pub fn relabel(&self, map: &[usize]) -> Circuit {
        Circuit { gates: self.gates.iter().map(|g| g.relabel(map)).collect() }
    }

    /// Appends gates realising `u` on `qubit` up to a global phase
    /// (`R_z R_y R_z`, near-zero angles omitted).
    pub fn push_unitary(&mut self, qubit: usize, u: &Mat2) {
        let (alpha, beta, gamma) = zyz_angles(u);
        // Rz(θ + 2π) = −Rz(θ), a global phase
        let wrap = |t: f64| {
            let w = t.rem_euclid(2.0 * PI);
            if w > PI { w - 2.0 * PI } else { w }
        };
        let gates = if beta.abs() > NEGLIGIBLE_ANGLE {
            vec![Gate::rz(qubit, wrap(gamma)), Gate::ry(qubit, beta), Gate::rz(qubit, wrap(alpha))]
        } else {
            vec![Gate::rz(qubit, wrap(alpha + gamma))]
        };
        for gate in gates {
            let angle = match gate {
                Gate::Rz { angle, .. } | Gate::Ry { angle, .. } => angle,
                _ => unreachable!(),
            };
            if angle.abs() > NEGLIGIBLE_ANGLE {
                self.push(gate);
            }
        }
    }

    /// Equivalent circuit (up to global phase) with each run of
    /// single-qubit gates between CNOTs fused into at most three rotations.
    pub fn compact(&self) -> Circuit {
        let qubits = self.gates.iter().map(Gate::max_qubit).max().unwrap_or(0);
        let mut pending: Vec<Option<Mat2>> = vec![None; qubits];
        let mut out = Circuit::new();
        let flush = |out: &mut Circuit, pending: &mut Vec<Option<Mat2>>, q: usize| {
            if let Some(u) = pending[q - 1].take() {
                out.push_unitary(q, &u);
            }
        };
        for gate in &self.gates {
            match *gate {
                Gate::Cnot { control, target } => {
                    flush(&mut out, &mut pending, control);
                    flush(&mut out, &mut pending, target);
                    out.push(*gate);
                }
                _ => {
                    let (q, m) = gate.single_qubit_matrix().expect("single-qubit gate");
                    let acc = pending[q - 1].take().unwrap_or_else(Mat2::identity);
                    pending[q - 1] = Some(m * acc);
                }
            }
        }
        for q in 1..=qubits {
            flush(&mut out, &mut pending, q);
        }
        out
    }

    /// Appends one local layer, `unitaries[k]` acting on qubit `k + 1`.
    pub fn push_local_layer(&mut self, unitaries: &[Mat2]) {
        for (k, u) in unitaries.iter().enumerate() {
            self.push_unitary(k + 1, u);
        }
    }
}

impl FromIterator<Gate> for Circuit {
    fn from_iter<I: IntoIterator<Item = Gate>>(iter: I) -> Self {
        Circuit { gates: iter.into_iter().collect() }
    }
}
