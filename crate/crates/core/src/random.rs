//! Seeded random matrices and states for experiments and test fixtures.

use num_complex::Complex64;
use rand::Rng;

use crate::linalg::ComplexMatrix;

/// Random Hermitian matrix with entries uniform in `[-1, 1]` (real and imaginary parts).
pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        h[(i, i)] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
        for j in i + 1..dim {
            let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
    }
    h
}

/// Random unitary `exp(i·3·H)` for a random Hermitian `H`.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let h = hermitian(rng, dim);
    let (vals, q) = h.hermitian_eigen().expect("constructed Hermitian");
    let phases: Vec<Complex64> = vals.iter().map(|&v| Complex64::from_polar(1.0, 3.0 * v)).collect();
    &(&q * &ComplexMatrix::diagonal(&phases)) * &q.adjoint()
}

/// Random normalised state of dimension `dim`.
pub fn state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<Complex64> {
    let mut amps: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    amps.iter_mut().for_each(|a| *a /= norm);
    amps
}

/// Uniform angles in `[0, 2π)`.
pub fn angles<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect()
}
