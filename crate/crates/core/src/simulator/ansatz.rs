//! Parametrised trainable blocks.
//!
//! Circuit A: every sublayer applies `Rot(φ, θ, ω) = R_z(ω) R_y(θ) R_z(φ)` to
//! each qubit, then a CNOT ring `i → (i + s) mod n` with range
//! `s = (sublayer mod (n − 1)) + 1`. This range rule is our reading of the
//! "layer-dependent entangling structure"; the original circuit is only
//! described by reference.
//!
//! Circuit B: every sublayer applies `R_x(θ)` to each qubit, then the
//! nearest-neighbour CNOT ring (`s = 1`).
//!
//! A single-qubit ansatz has no entanglers. Parameters are laid out sublayer by
//! sublayer, qubit by qubit, and for Circuit A as `(φ, θ, ω)` per qubit.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::circuit::Op;
use super::gates::PauliAxis;
use super::state::StateVector;
use super::SimError;
use crate::linalg::ComplexMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AnsatzKind {
    A,
    B,
}

impl AnsatzKind {
    fn params_per_qubit(self) -> usize {
        match self {
            AnsatzKind::A => 3,
            AnsatzKind::B => 1,
        }
    }
}

impl fmt::Display for AnsatzKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AnsatzKind::A => "A",
            AnsatzKind::B => "B",
        })
    }
}

impl FromStr for AnsatzKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A" | "a" => Ok(AnsatzKind::A),
            "B" | "b" => Ok(AnsatzKind::B),
            other => Err(format!("unknown ansatz {other:?}, expected A or B")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ansatz {
    pub kind: AnsatzKind,
    pub sublayers: usize,
}

impl Ansatz {
    pub fn new(kind: AnsatzKind, sublayers: usize) -> Self {
        Self { kind, sublayers }
    }

    pub fn param_count(&self, n_qubits: usize) -> usize {
        self.sublayers * n_qubits * self.kind.params_per_qubit()
    }

    /// Gate sequence with parameters numbered from `offset`.
    pub(crate) fn ops(&self, n_qubits: usize, offset: usize) -> Vec<Op> {
        let mut ops = Vec::new();
        let mut p = offset;
        for layer in 0..self.sublayers {
            for qubit in 0..n_qubits {
                match self.kind {
                    AnsatzKind::A => {
                        for axis in [PauliAxis::Z, PauliAxis::Y, PauliAxis::Z] {
                            ops.push(Op::Rotation { qubit, axis, param: p });
                            p += 1;
                        }
                    }
                    AnsatzKind::B => {
                        ops.push(Op::Rotation { qubit, axis: PauliAxis::X, param: p });
                        p += 1;
                    }
                }
            }
            if n_qubits > 1 {
                let range = match self.kind {
                    AnsatzKind::A => layer % (n_qubits - 1) + 1,
                    AnsatzKind::B => 1,
                };
                for control in 0..n_qubits {
                    ops.push(Op::Cnot { control, target: (control + range) % n_qubits });
                }
            }
        }
        ops
    }
}

/// Dense unitary of an ansatz block on `n_qubits` qubits.
pub fn ansatz_unitary(spec: &Ansatz, params: &[f64], n_qubits: usize) -> Result<ComplexMatrix, SimError> {
    let expected = spec.param_count(n_qubits);
    if params.len() != expected {
        return Err(SimError::ParamCountMismatch { expected, got: params.len() });
    }
    let ops = spec.ops(n_qubits, 0);
    let dim = 1usize << n_qubits;
    let mut u = ComplexMatrix::zeros(dim, dim);
    for col in 0..dim {
        let mut psi = StateVector::basis(n_qubits, col);
        for op in &ops {
            match *op {
                Op::Rotation { qubit, axis, param } => psi.apply_single(qubit, &axis.rotation(params[param])),
                Op::Cnot { control, target } => psi.apply_cnot(control, target),
                _ => unreachable!("ansatz emits only rotations and CNOTs"),
            }
        }
        for (row, a) in psi.amplitudes().iter().enumerate() {
            u[(row, col)] = *a;
        }
    }
    Ok(u)
}
