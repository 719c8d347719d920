//! Dense statevector simulation of layered variational models.

mod ansatz;
mod circuit;
mod gates;
mod model;
mod state;

pub use ansatz::{ansatz_unitary, Ansatz, AnsatzKind};
pub use circuit::ShiftTable;
pub use gates::{cnot, hadamard, mat2_adjoint, mat2_mul, mat2_to_matrix, rot, Mat2, PauliAxis};
pub use model::{
    diagonalize_generator, encoding_unitary, CircuitModel, DiagonalBlock, DiagonalizedModel, EncodingSpec,
    GeneratorEncoding, Layer, Observable, TrainableBlock,
};
pub use state::{apply_gate, StateVector, NORM_TOL};

use crate::linalg::LinalgError;
use crate::spectra::SpectrumError;

pub const DEFAULT_MAX_QUBITS: usize = 12;
pub const MAX_QUBITS_ENV: &str = "FOURIER_QML_MAX_QUBITS";

/// Qubit cap for dense simulation; `FOURIER_QML_MAX_QUBITS` overrides the default of 12.
pub fn max_qubits() -> usize {
    std::env::var(MAX_QUBITS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_QUBITS)
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum SimError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("qubit {qubit} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("qubit {0} targeted twice")]
    DuplicateTarget(usize),
    #[error("state is not normalised (norm {0})")]
    NotNormalized(f64),
    #[error("expected {expected} parameters, got {got}")]
    ParamCountMismatch { expected: usize, got: usize },
    #[error("expected {expected} input features, got {got}")]
    FeatureCountMismatch { expected: usize, got: usize },
    #[error("feature index {feature} out of range for {n_features} feature(s)")]
    FeatureOutOfRange { feature: usize, n_features: usize },
    #[error("input features must be finite")]
    NonFiniteInput,
    #[error("trainable block is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("{n_qubits} qubits exceed the simulator cap of {cap}")]
    TooManyQubits { n_qubits: usize, cap: usize },
    #[error("expectation value has imaginary part {0:.3e}")]
    NonRealExpectation(f64),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ComplexMatrix;
    use crate::random;
    use crate::spectra::EncodingHamiltonian;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn identity_block(n: usize) -> TrainableBlock {
        TrainableBlock::Fixed(ComplexMatrix::identity(1 << n))
    }

    fn single_rotation_model(axis: PauliAxis, observable: Observable) -> CircuitModel {
        CircuitModel::sequential_pauli(1, 1, axis, identity_block(1), observable).unwrap()
    }

    #[test]
    fn rz_model_is_constant() {
        let m = single_rotation_model(PauliAxis::Z, Observable::PauliZ { qubit: 0 });
        for x in [0.0, 0.3, 2.0, 5.9] {
            assert!((m.evaluate(&[], &[x]).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn rx_model_is_cosine() {
        let m = single_rotation_model(PauliAxis::X, Observable::PauliZ { qubit: 0 });
        for x in [0.0, 0.3, 2.0, 5.9] {
            assert!((m.evaluate(&[], &[x]).unwrap() - x.cos()).abs() < 1e-14);
        }
    }

    #[test]
    fn identity_observable_gives_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let block = TrainableBlock::Ansatz(Ansatz::new(AnsatzKind::A, 2));
        let m = CircuitModel::sequential_pauli(2, 2, PauliAxis::Y, block, Observable::Dense(ComplexMatrix::identity(4))).unwrap();
        for _ in 0..10 {
            let theta = random::angles(&mut rng, m.param_count());
            let v = m.evaluate(&theta, &[rng.gen_range(0.0..6.0)]).unwrap();
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn encoding_unitary_examples() {
        let rz = EncodingSpec::PauliRotation { axis: PauliAxis::Z, qubit: 0, feature: 0 };
        assert!(encoding_unitary(&rz, &[0.0]).unwrap().max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);

        let diag = EncodingSpec::Diagonal {
            blocks: vec![DiagonalBlock {
                qubits: vec![0],
                feature: 0,
                hamiltonian: EncodingHamiltonian::new(vec![-1.0, 1.0]).unwrap(),
            }],
        };
        let u = encoding_unitary(&diag, &[PI]).unwrap();
        assert!(u.max_abs_diff(&ComplexMatrix::identity(2).scale((-1.0).into())) < 1e-15);

        let rx = EncodingSpec::PauliRotation { axis: PauliAxis::X, qubit: 0, feature: 0 };
        let u = encoding_unitary(&rx, &[PI]).unwrap();
        let mi = Complex64::new(0.0, -1.0);
        let want = ComplexMatrix::from_row_major(2, 2, vec![0.0.into(), mi, mi, 0.0.into()]).unwrap();
        assert!(u.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn parallel_encoding_unitary_is_a_tensor_product() {
        let spec = EncodingSpec::ParallelPauli { axis: PauliAxis::Y, qubits: vec![2, 0], features: vec![0, 1] };
        let u = encoding_unitary(&spec, &[0.4, -1.3]).unwrap();
        let want = mat2_to_matrix(&PauliAxis::Y.rotation(0.4)).kron(&mat2_to_matrix(&PauliAxis::Y.rotation(-1.3)));
        assert!(u.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn diagonalize_examples() {
        let z = mat2_to_matrix(&PauliAxis::Z.pauli());
        let (h, v) = diagonalize_generator(&z).unwrap();
        assert_eq!(h.eigenvalues(), &[-1.0, 1.0]);
        let sigma = ComplexMatrix::diagonal(&[(-1.0).into(), 1.0.into()]);
        assert!((&(&v.adjoint() * &sigma) * &v).max_abs_diff(&z) <= 1e-8);

        let x = mat2_to_matrix(&PauliAxis::X.pauli());
        let (h, v) = diagonalize_generator(&x).unwrap();
        assert!((h.eigenvalues()[0] + 1.0).abs() < 1e-14 && (h.eigenvalues()[1] - 1.0).abs() < 1e-14);
        assert!((&(&v.adjoint() * &sigma) * &v).max_abs_diff(&x) <= 1e-8);
        assert!(v.iter_abs_equal(std::f64::consts::FRAC_1_SQRT_2));

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let hm = random::hermitian(&mut rng, 4);
            let (h, v) = diagonalize_generator(&hm).unwrap();
            let s = ComplexMatrix::diagonal(&h.eigenvalues().iter().map(|&l| l.into()).collect::<Vec<_>>());
            assert!((&(&v.adjoint() * &s) * &v).max_abs_diff(&hm) <= 1e-8);
            assert!(v.is_unitary());
        }

        let bad = ComplexMatrix::from_row_major(2, 2, vec![0.0.into(), 1.0.into(), 0.0.into(), 0.0.into()]).unwrap();
        assert!(matches!(diagonalize_generator(&bad), Err(SimError::NotHermitian(_))));
    }

    trait AbsCheck {
        fn iter_abs_equal(&self, v: f64) -> bool;
    }

    impl AbsCheck for ComplexMatrix {
        fn iter_abs_equal(&self, v: f64) -> bool {
            self.as_slice().iter().all(|z| (z.norm() - v).abs() < 1e-12)
        }
    }

    #[test]
    fn model_validation() {
        let enc = EncodingSpec::PauliRotation { axis: PauliAxis::X, qubit: 3, feature: 0 };
        let layer = Layer { trainable: identity_block(1), encoding: enc };
        let err = CircuitModel::new(1, 1, 1.0, vec![layer], identity_block(1), Observable::PauliZ { qubit: 0 });
        assert!(matches!(err, Err(SimError::QubitOutOfRange { qubit: 3, .. })));

        let m = single_rotation_model(PauliAxis::X, Observable::PauliZ { qubit: 0 });
        assert!(matches!(m.evaluate(&[1.0], &[0.0]), Err(SimError::ParamCountMismatch { .. })));
        assert!(matches!(m.evaluate(&[], &[0.0, 1.0]), Err(SimError::FeatureCountMismatch { .. })));
        assert!(matches!(m.with_input_scale(-1.0), Err(SimError::InvalidModel(_))));

        let not_unitary = TrainableBlock::Fixed(ComplexMatrix::identity(2).scale(2.0.into()));
        assert!(matches!(
            CircuitModel::sequential_pauli(1, 1, PauliAxis::X, not_unitary, Observable::PauliZ { qubit: 0 }),
            Err(SimError::NotUnitary(_))
        ));
        assert!(matches!(
            CircuitModel::parallel_pauli(13, PauliAxis::X, TrainableBlock::Ansatz(Ansatz::new(AnsatzKind::B, 1)), Observable::PauliZ { qubit: 0 }),
            Err(SimError::TooManyQubits { .. })
        ));
    }

    /// Random model mixing all block and encoding kinds, 1 to 3 qubits.
    fn random_model(rng: &mut ChaCha8Rng) -> CircuitModel {
        let n = rng.gen_range(1..=3);
        let n_features = rng.gen_range(1..=2);
        let n_layers = rng.gen_range(1..=3);
        let block = |rng: &mut ChaCha8Rng| match rng.gen_range(0..3) {
            0 => TrainableBlock::Fixed(random::unitary(rng, 1 << n)),
            1 => TrainableBlock::Ansatz(Ansatz::new(AnsatzKind::A, rng.gen_range(1..=2))),
            _ => TrainableBlock::Ansatz(Ansatz::new(AnsatzKind::B, rng.gen_range(1..=2))),
        };
        let axis = |rng: &mut ChaCha8Rng| [PauliAxis::X, PauliAxis::Y, PauliAxis::Z][rng.gen_range(0..3)];
        let layers = (0..n_layers)
            .map(|_| {
                let encoding = match rng.gen_range(0..3) {
                    0 => EncodingSpec::PauliRotation { axis: axis(rng), qubit: rng.gen_range(0..n), feature: rng.gen_range(0..n_features) },
                    1 => EncodingSpec::ParallelPauli {
                        axis: axis(rng),
                        qubits: (0..n).collect(),
                        features: (0..n).map(|_| rng.gen_range(0..n_features)).collect(),
                    },
                    _ => EncodingSpec::Generator(
                        GeneratorEncoding::new(vec![0], rng.gen_range(0..n_features), random::hermitian(rng, 2)).unwrap(),
                    ),
                };
                Layer { trainable: block(rng), encoding }
            })
            .collect();
        let observable = if rng.gen_bool(0.5) {
            Observable::PauliZ { qubit: rng.gen_range(0..n) }
        } else {
            Observable::Dense(random::hermitian(rng, 1 << n))
        };
        let fin = block(rng);
        CircuitModel::new(n, n_features, rng.gen_range(0.5..2.0), layers, fin, observable).unwrap()
    }

    #[test]
    fn norm_and_realness_over_random_models() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..100 {
            let m = random_model(&mut rng);
            let theta = random::angles(&mut rng, m.param_count());
            let x = random::angles(&mut rng, m.n_features());
            let psi = m.final_state(&theta, &x).unwrap();
            assert!((psi.norm() - 1.0).abs() <= 1e-10);
            let v = psi.expectation(&m.observable().matrix(m.n_qubits())).unwrap();
            assert!(v.im.abs() <= 1e-10);
            assert!((v.re - m.evaluate(&theta, &x).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn absorbing_basis_changes_preserves_the_model() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..20 {
            let m = random_model(&mut rng);
            let theta = random::angles(&mut rng, m.param_count());
            let diag = m.diagonalized(&theta).unwrap();
            for _ in 0..20 {
                let x = random::angles(&mut rng, m.n_features());
                let a = m.evaluate(&theta, &x).unwrap();
                let b = diag.evaluate(&x).unwrap();
                assert!((a - b).abs() <= 1e-8, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn shifted_expectations_match_direct_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let m = random_model(&mut rng);
            let theta = random::angles(&mut rng, m.param_count());
            let x = random::angles(&mut rng, m.n_features());
            let table = m.shifted_expectations(&theta, &x, 0.7).unwrap();
            assert!((table.base - m.evaluate(&theta, &x).unwrap()).abs() < 1e-12);
            for k in 0..m.param_count() {
                let mut t = theta.clone();
                t[k] += 0.7;
                assert!((table.plus[k] - m.evaluate(&t, &x).unwrap()).abs() < 1e-12);
                t[k] -= 1.4;
                assert!((table.minus[k] - m.evaluate(&t, &x).unwrap()).abs() < 1e-12);
            }
        }
    }
}
