//! Dense statevectors and gate application.
//!
//! Qubit `q` is bit `q` of the basis-state index (qubit 0 is the least
//! significant bit). For a gate acting on `targets`, `targets[0]` is the most
//! significant bit of the gate's own row/column index, so `CNOT` on `[c, t]`
//! has its control on `c`.

use num_complex::Complex64;

use super::gates::Mat2;
use super::SimError;
use crate::linalg::ComplexMatrix;

pub const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩` on `n_qubits` qubits.
    pub fn zero(n_qubits: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Self { n_qubits, amps }
    }

    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        Self { n_qubits, amps }
    }

    /// Wraps raw amplitudes. The length must be a power of two and the vector
    /// normalised to within [`NORM_TOL`].
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, SimError> {
        if amps.is_empty() || !amps.len().is_power_of_two() {
            return Err(SimError::DimensionMismatch(format!(
                "state length {} is not a power of two",
                amps.len()
            )));
        }
        let state = Self {
            n_qubits: amps.len().trailing_zeros() as usize,
            amps,
        };
        let norm = state.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(SimError::NotNormalized(norm));
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn check_targets(&self, targets: &[usize]) -> Result<(), SimError> {
        for (i, &t) in targets.iter().enumerate() {
            if t >= self.n_qubits {
                return Err(SimError::QubitOutOfRange { qubit: t, n_qubits: self.n_qubits });
            }
            if targets[..i].contains(&t) {
                return Err(SimError::DuplicateTarget(t));
            }
        }
        Ok(())
    }

    /// Applies a `2^k × 2^k` gate to `k` distinct target qubits.
    pub fn apply(&mut self, gate: &ComplexMatrix, targets: &[usize]) -> Result<(), SimError> {
        let k = targets.len();
        if !gate.is_square() || gate.rows() != 1 << k {
            return Err(SimError::DimensionMismatch(format!(
                "{}x{} gate on {k} target qubit(s)",
                gate.rows(),
                gate.cols()
            )));
        }
        self.check_targets(targets)?;
        if k == 1 {
            let g = gate.as_slice();
            self.apply_single(targets[0], &[[g[0], g[1]], [g[2], g[3]]]);
            return Ok(());
        }
        let offsets = local_offsets(targets);
        let mask: usize = targets.iter().map(|&t| 1usize << t).sum();
        let mut buf = vec![Complex64::new(0.0, 0.0); 1 << k];
        for base in 0..self.amps.len() {
            if base & mask != 0 {
                continue;
            }
            for (b, &o) in buf.iter_mut().zip(&offsets) {
                *b = self.amps[base | o];
            }
            for (row, &o) in offsets.iter().enumerate() {
                let r = &gate.as_slice()[row << k..(row + 1) << k];
                self.amps[base | o] = r.iter().zip(&buf).map(|(g, a)| g * a).sum();
            }
        }
        Ok(())
    }

    /// Fast path for single-qubit gates; `q` must be in range.
    pub fn apply_single(&mut self, q: usize, m: &Mat2) {
        let bit = 1usize << q;
        let n = self.amps.len();
        let mut hi = 0;
        while hi < n {
            for i in hi..hi + bit {
                let a0 = self.amps[i];
                let a1 = self.amps[i | bit];
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
            hi += bit << 1;
        }
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) {
        let (cb, tb) = (1usize << control, 1usize << target);
        for i in 0..self.amps.len() {
            if i & cb != 0 && i & tb == 0 {
                self.amps.swap(i, i | tb);
            }
        }
    }

    /// Multiplies amplitude `i` by `phases[i]`.
    pub fn apply_full_diagonal(&mut self, phases: &[Complex64]) {
        for (a, p) in self.amps.iter_mut().zip(phases) {
            *a *= p;
        }
    }

    /// Full-register matrix; `m` must be `dim × dim`.
    pub fn apply_full(&mut self, m: &ComplexMatrix) -> Result<(), SimError> {
        self.amps = m.matvec(&self.amps)?;
        Ok(())
    }

    /// `⟨ψ|M|ψ⟩` for a full-register matrix.
    pub fn expectation(&self, m: &ComplexMatrix) -> Result<Complex64, SimError> {
        let mv = m.matvec(&self.amps)?;
        Ok(self.amps.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn expectation_z(&self, q: usize) -> f64 {
        let bit = 1usize << q;
        self.amps
            .iter()
            .enumerate()
            .map(|(i, a)| if i & bit == 0 { a.norm_sqr() } else { -a.norm_sqr() })
            .sum()
    }
}

/// Global-index offsets for each local index of a gate on `targets`.
pub(crate) fn local_offsets(targets: &[usize]) -> Vec<usize> {
    let k = targets.len();
    (0..1usize << k)
        .map(|local| {
            targets
                .iter()
                .enumerate()
                .filter(|(i, _)| local >> (k - 1 - i) & 1 == 1)
                .map(|(_, &t)| 1usize << t)
                .sum()
        })
        .collect()
}

/// Out-of-place gate application.
pub fn apply_gate(state: &StateVector, gate: &ComplexMatrix, targets: &[usize]) -> Result<StateVector, SimError> {
    let mut out = state.clone();
    out.apply(gate, targets)?;
    Ok(out)
}
