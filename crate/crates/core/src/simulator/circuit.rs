//! Flattened gate sequence of a model and the statevector engine that runs it.

use num_complex::Complex64;

use super::gates::{Mat2, PauliAxis};
use super::model::{CircuitModel, Observable};
use super::state::StateVector;
use super::SimError;
use crate::linalg::ComplexMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Op {
    /// `R_axis(θ[param])`.
    Rotation { qubit: usize, axis: PauliAxis, param: usize },
    Cnot { control: usize, target: usize },
    /// Dense fixed trainable block, by block index.
    Fixed(usize),
    /// Data-encoding layer, by layer index.
    Encoding(usize),
}

/// An encoding layer realised at a concrete input.
#[derive(Debug, Clone)]
pub(crate) enum EncodingGate {
    Single { qubit: usize, gate: Mat2 },
    Multi { targets: Vec<usize>, gate: ComplexMatrix },
}

/// Parameter-shifted expectation values at one input.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftTable {
    pub base: f64,
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
}

pub(crate) struct Run<'m> {
    model: &'m CircuitModel,
    params: &'m [f64],
    encodings: Vec<Vec<EncodingGate>>,
}

impl<'m> Run<'m> {
    pub(crate) fn new(model: &'m CircuitModel, params: &'m [f64], x: &[f64]) -> Result<Self, SimError> {
        model.check_params(params)?;
        let scaled = model.scaled_input(x)?;
        let encodings = model
            .layers()
            .iter()
            .map(|layer| layer.encoding.gates(&scaled))
            .collect();
        Ok(Self { model, params, encodings })
    }

    fn apply(&self, op: &Op, psi: &mut StateVector, shift: f64) -> Result<(), SimError> {
        match *op {
            Op::Rotation { qubit, axis, param } => {
                psi.apply_single(qubit, &axis.rotation(self.params[param] + shift));
            }
            Op::Cnot { control, target } => psi.apply_cnot(control, target),
            Op::Fixed(block) => {
                let m = self.model.fixed_block(block).expect("compiled from a fixed block");
                psi.apply_full(m)?;
            }
            Op::Encoding(layer) => {
                for g in &self.encodings[layer] {
                    match g {
                        EncodingGate::Single { qubit, gate } => psi.apply_single(*qubit, gate),
                        EncodingGate::Multi { targets, gate } => psi.apply(gate, targets)?,
                    }
                }
            }
        }
        Ok(())
    }

    pub(crate) fn final_state(&self) -> Result<StateVector, SimError> {
        let mut psi = StateVector::zero(self.model.n_qubits());
        for op in self.model.ops() {
            self.apply(op, &mut psi, 0.0)?;
        }
        Ok(psi)
    }

    pub(crate) fn measure(&self, psi: &StateVector) -> Result<f64, SimError> {
        expectation(self.model.observable(), psi)
    }

    /// Expectation values with each rotation parameter shifted by `±delta`,
    /// one parameter at a time. The forward pass is shared: every shifted
    /// evaluation restarts from the state just before its gate.
    pub(crate) fn shifted(&self, delta: f64) -> Result<ShiftTable, SimError> {
        let ops = self.model.ops();
        let n_params = self.params.len();
        let mut snapshots: Vec<(usize, usize, StateVector)> = Vec::with_capacity(n_params);
        let mut psi = StateVector::zero(self.model.n_qubits());
        for (i, op) in ops.iter().enumerate() {
            if let Op::Rotation { param, .. } = *op {
                snapshots.push((i, param, psi.clone()));
            }
            self.apply(op, &mut psi, 0.0)?;
        }
        let base = self.measure(&psi)?;
        let mut plus = vec![0.0; n_params];
        let mut minus = vec![0.0; n_params];
        for (i, param, before) in snapshots {
            for (sign, slot) in [(1.0, &mut plus), (-1.0, &mut minus)] {
                let mut st = before.clone();
                self.apply(&ops[i], &mut st, sign * delta)?;
                for op in &ops[i + 1..] {
                    self.apply(op, &mut st, 0.0)?;
                }
                slot[param] = self.measure(&st)?;
            }
        }
        Ok(ShiftTable { base, plus, minus })
    }
}

pub(crate) fn expectation(observable: &Observable, psi: &StateVector) -> Result<f64, SimError> {
    match observable {
        Observable::PauliZ { qubit } => Ok(psi.expectation_z(*qubit)),
        Observable::Dense(m) => {
            let v: Complex64 = psi.expectation(m)?;
            // imaginary residue is pure rounding; scale the check with the entries of M
            if v.im.abs() > 1e-10 * m.max_abs().max(1.0) {
                return Err(SimError::NonRealExpectation(v.im));
            }
            Ok(v.re)
        }
    }
}
