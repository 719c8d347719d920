//! Standard gate matrices.
//!
//! Rotations follow `R_σ(θ) = exp(−i θ σ / 2)`, so a rotation used as an
//! encoding gate has generator `σ/2` and eigenvalues `±1/2`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::ComplexMatrix;

/// 2×2 matrix in row-major order.
pub type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl PauliAxis {
    pub fn pauli(self) -> Mat2 {
        match self {
            PauliAxis::X => [[ZERO, ONE], [ONE, ZERO]],
            PauliAxis::Y => [[ZERO, -I], [I, ZERO]],
            PauliAxis::Z => [[ONE, ZERO], [ZERO, -ONE]],
        }
    }

    pub fn rotation(self, theta: f64) -> Mat2 {
        let (s, c) = (theta / 2.0).sin_cos();
        match self {
            PauliAxis::X => [[c.into(), -I * s], [-I * s, c.into()]],
            PauliAxis::Y => [[c.into(), (-s).into()], [s.into(), c.into()]],
            PauliAxis::Z => [[Complex64::from_polar(1.0, -theta / 2.0), ZERO], [ZERO, Complex64::from_polar(1.0, theta / 2.0)]],
        }
    }

    /// Basis change `V` with `σ = V† σ_z V`; the rotation then factors as
    /// `V† R_z(θ) V`.
    pub fn eigenbasis(self) -> Mat2 {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            PauliAxis::X => [[h.into(), h.into()], [h.into(), (-h).into()]],
            PauliAxis::Y => [[h.into(), -I * h], [h.into(), I * h]],
            PauliAxis::Z => [[ONE, ZERO], [ZERO, ONE]],
        }
    }
}

pub fn mat2_to_matrix(m: &Mat2) -> ComplexMatrix {
    ComplexMatrix::from_row_major(2, 2, vec![m[0][0], m[0][1], m[1][0], m[1][1]]).expect("2x2")
}

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn mat2_adjoint(a: &Mat2) -> Mat2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

/// General rotation `Rot(φ, θ, ω) = R_z(ω) R_y(θ) R_z(φ)`.
pub fn rot(phi: f64, theta: f64, omega: f64) -> Mat2 {
    mat2_mul(
        &PauliAxis::Z.rotation(omega),
        &mat2_mul(&PauliAxis::Y.rotation(theta), &PauliAxis::Z.rotation(phi)),
    )
}

pub fn hadamard() -> Mat2 {
    PauliAxis::X.eigenbasis()
}

/// CNOT with the control on the first (most significant) target.
pub fn cnot() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4, 4);
    m[(0, 0)] = ONE;
    m[(1, 1)] = ONE;
    m[(2, 3)] = ONE;
    m[(3, 2)] = ONE;
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Mat2, b: &Mat2) -> bool {
        a.iter().flatten().zip(b.iter().flatten()).all(|(x, y)| (x - y).norm() < 1e-14)
    }

    #[test]
    fn rx_at_pi_is_minus_i_x() {
        let m = PauliAxis::X.rotation(std::f64::consts::PI);
        // cos(π/2) I − i sin(π/2) σ_x
        let expected = [[ZERO, -I], [-I, ZERO]];
        assert!(close(&m, &expected));
    }

    #[test]
    fn eigenbasis_diagonalises_each_pauli() {
        let z = PauliAxis::Z.pauli();
        for axis in [PauliAxis::X, PauliAxis::Y, PauliAxis::Z] {
            let v = axis.eigenbasis();
            let rebuilt = mat2_mul(&mat2_adjoint(&v), &mat2_mul(&z, &v));
            assert!(close(&rebuilt, &axis.pauli()), "{axis:?}");
            let theta = 0.731;
            let via_z = mat2_mul(&mat2_adjoint(&v), &mat2_mul(&PauliAxis::Z.rotation(theta), &v));
            assert!(close(&via_z, &axis.rotation(theta)), "{axis:?}");
        }
    }

    #[test]
    fn rotations_compose_additively() {
        for axis in [PauliAxis::X, PauliAxis::Y, PauliAxis::Z] {
            let ab = mat2_mul(&axis.rotation(0.4), &axis.rotation(1.1));
            assert!(close(&ab, &axis.rotation(1.5)));
        }
    }

    #[test]
    fn rot_with_only_theta_is_ry() {
        assert!(close(&rot(0.0, 0.9, 0.0), &PauliAxis::Y.rotation(0.9)));
    }
}
