//! Exact construction of a single-layer model reproducing any truncated
//! Fourier series.
//!
//! Every feature is encoded on its own block of `m′ = K` qubits through the
//! on-site generator `H = Σ σ_z/2`, whose frequency spectrum is `{−K, …, K}`.
//! The initial block prepares the equal superposition `|Γ⟩`, the final block
//! is the identity, and all coefficient information lives in the observable:
//! for each frequency `n` exactly one entry `M_{jk}` with `λ_j − λ_k = n`
//! carries `2^{N m′} c_n`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fourier::{FourierCoefficients, FourierError};
use crate::linalg::ComplexMatrix;
use crate::simulator::{
    max_qubits, CircuitModel, DiagonalBlock, EncodingSpec, Layer, Observable, SimError, TrainableBlock,
};
use crate::spectra::{frequency_spectrum, EncodingHamiltonian, FrequencySpectrum};

pub const MAX_FEATURES: usize = 3;
/// Tolerance for conjugate symmetry and realness of `c_0` in user targets.
pub const TARGET_TOL: f64 = 1e-10;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum UniversalError {
    #[error("invalid target series: {0}")]
    InvalidTarget(String),
    #[error("construction needs {n_qubits} qubits, above the cap of {cap}")]
    DimensionCap { n_qubits: usize, cap: usize },
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Fourier(#[from] FourierError),
}

/// The on-site family `H_m = Σ_{i=1}^m σ_z^{(i)}/2`.
#[derive(Debug, Clone, Copy, Default)]
pub struct UniversalHamiltonianFamily;

impl UniversalHamiltonianFamily {
    pub fn member(&self, m: usize) -> EncodingHamiltonian {
        EncodingHamiltonian::pauli_sum(m)
    }

    pub fn spectrum(&self, m: usize) -> FrequencySpectrum {
        frequency_spectrum(&self.member(m), 1).expect("one repetition of a nonempty generator")
    }

    /// Smallest `m` with `{−K, …, K} ⊆ Ω_{H_m}`.
    pub fn smallest_member(&self, degree: u32) -> usize {
        let want = FrequencySpectrum::truncated(degree);
        (0..).find(|&m| want.is_subset_of(&self.spectrum(m))).expect("family is universal")
    }
}

/// A real-valued truncated Fourier series over `{−K, …, K}^N`. Conjugate
/// symmetry holds exactly: only one of `c_n`, `c_{−n}` is ever stored.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSeries {
    n_features: usize,
    degree: u32,
    coeffs: Vec<Complex64>,
}

impl TargetSeries {
    /// All-zero series.
    pub fn zero(n_features: usize, degree: u32) -> Result<Self, UniversalError> {
        if n_features == 0 {
            return Err(UniversalError::InvalidTarget("at least one feature is required".into()));
        }
        let len = (2 * degree as usize + 1).pow(n_features as u32);
        Ok(Self { n_features, degree, coeffs: vec![Complex64::new(0.0, 0.0); len] })
    }

    /// Builds a series from `(n, c_n)` pairs. A missing partner `c_{−n}` is
    /// filled in by conjugation; a supplied partner must agree with it.
    pub fn new<I>(n_features: usize, degree: u32, entries: I) -> Result<Self, UniversalError>
    where
        I: IntoIterator<Item = (Vec<i64>, Complex64)>,
    {
        let mut out = Self::zero(n_features, degree)?;
        let mut seen = vec![false; out.coeffs.len()];
        for (n, c) in entries {
            let idx = out.index(&n)?;
            let neg: Vec<i64> = n.iter().map(|v| -v).collect();
            let nidx = out.index(&neg)?;
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(UniversalError::InvalidTarget(format!("coefficient at {n:?} is not finite")));
            }
            if seen[idx] {
                return Err(UniversalError::InvalidTarget(format!("frequency {n:?} listed twice")));
            }
            if idx == nidx && c.im.abs() > TARGET_TOL {
                return Err(UniversalError::InvalidTarget(format!("c_0 must be real, got {c}")));
            }
            if seen[nidx] && (out.coeffs[nidx] - c.conj()).norm() > TARGET_TOL {
                return Err(UniversalError::InvalidTarget(format!(
                    "c at {n:?} is not the conjugate of c at {neg:?}"
                )));
            }
            seen[idx] = true;
            if idx == nidx {
                out.coeffs[idx] = Complex64::new(c.re, 0.0);
            } else if !seen[nidx] || is_canonical(&n) {
                out.coeffs[idx] = c;
                out.coeffs[nidx] = c.conj();
            }
        }
        Ok(out)
    }

    /// Random target with `c_0 ∈ [−a, a]` and real and imaginary parts of
    /// the other coefficients in `[−a, a]`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n_features: usize, degree: u32, amplitude: f64) -> Result<Self, UniversalError> {
        let mut out = Self::zero(n_features, degree)?;
        for n in out.frequencies() {
            if !is_canonical(&n) {
                continue;
            }
            let c = if n.iter().all(|&v| v == 0) {
                Complex64::new(rng.gen_range(-amplitude..=amplitude), 0.0)
            } else {
                Complex64::new(rng.gen_range(-amplitude..=amplitude), rng.gen_range(-amplitude..=amplitude))
            };
            let idx = out.index(&n)?;
            let nidx = out.index(&n.iter().map(|v| -v).collect::<Vec<_>>())?;
            out.coeffs[idx] = c;
            out.coeffs[nidx] = c.conj();
        }
        Ok(out)
    }

    fn index(&self, n: &[i64]) -> Result<usize, UniversalError> {
        if n.len() != self.n_features {
            return Err(UniversalError::InvalidTarget(format!(
                "frequency {n:?} has {} component(s), expected {}",
                n.len(),
                self.n_features
            )));
        }
        let k = self.degree as i64;
        let base = 2 * self.degree as usize + 1;
        let mut idx = 0;
        for &v in n.iter().rev() {
            if v.abs() > k {
                return Err(UniversalError::InvalidTarget(format!("frequency {n:?} exceeds degree {k}")));
            }
            idx = idx * base + (v + k) as usize;
        }
        Ok(idx)
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Every `n ∈ {−K, …, K}^N`, feature 0 varying fastest.
    pub fn frequencies(&self) -> Vec<Vec<i64>> {
        let base = 2 * self.degree as usize + 1;
        let k = self.degree as i64;
        (0..self.coeffs.len())
            .map(|mut idx| {
                (0..self.n_features)
                    .map(|_| {
                        let v = (idx % base) as i64 - k;
                        idx /= base;
                        v
                    })
                    .collect()
            })
            .collect()
    }

    pub fn coefficient(&self, n: &[i64]) -> Result<Complex64, UniversalError> {
        Ok(self.coeffs[self.index(n)?])
    }

    pub fn to_coefficients(&self) -> FourierCoefficients {
        FourierCoefficients::from_entries(
            self.n_features,
            self.frequencies()
                .into_iter()
                .zip(&self.coeffs)
                .map(|(n, &c)| (n.iter().map(|&v| v as f64).collect(), c)),
        )
        .expect("frequency lengths match")
    }

    /// `g(x) = Σ_n c_n e^{in·x}`.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.frequencies()
            .iter()
            .zip(&self.coeffs)
            .map(|(n, c)| {
                let phase: f64 = n.iter().zip(x).map(|(&a, b)| a as f64 * b).sum();
                (c * Complex64::from_polar(1.0, phase)).re
            })
            .sum()
    }
}

/// Zero, or first nonzero component positive.
fn is_canonical(n: &[i64]) -> bool {
    n.iter().find(|&&v| v != 0).is_none_or(|&v| v > 0)
}

/// The constructed model and its ingredients.
#[derive(Debug, Clone)]
pub struct UniversalModel {
    /// `m′`, qubits per feature.
    pub qubits_per_feature: usize,
    pub gamma: Vec<Complex64>,
    pub observable: ComplexMatrix,
    /// Per-feature encoding generators, feature 0 on the lowest qubits.
    pub hamiltonians: Vec<EncodingHamiltonian>,
    /// Selection set: each canonical `n` with its basis-index pair `(j, k)`.
    pub selection: Vec<(Vec<i64>, usize, usize)>,
    pub model: CircuitModel,
}

pub fn build_universal_model(target: &TargetSeries) -> Result<UniversalModel, UniversalError> {
    let n_features = target.n_features;
    if n_features > MAX_FEATURES {
        return Err(UniversalError::InvalidTarget(format!(
            "{n_features} features; at most {MAX_FEATURES} supported"
        )));
    }
    let family = UniversalHamiltonianFamily;
    // a zero-degree target still needs a register to measure on
    let m = family.smallest_member(target.degree).max(1);
    let n_qubits = m * n_features;
    let cap = max_qubits();
    if n_qubits > cap {
        return Err(UniversalError::DimensionCap { n_qubits, cap });
    }
    let dim = 1usize << n_qubits;
    let amp = Complex64::new((dim as f64).sqrt().recip(), 0.0);
    let gamma = vec![amp; dim];

    let selection = select_pairs(n_features, m, target.degree);
    let scale = dim as f64;
    let mut observable = ComplexMatrix::zeros(dim, dim);
    for (n, j, k) in &selection {
        let c = target.coefficient(n)? * scale;
        observable[(*j, *k)] = c;
        observable[(*k, *j)] = c.conj();
    }

    let hamiltonians = vec![family.member(m); n_features];
    let blocks = (0..n_features)
        .map(|f| DiagonalBlock {
            qubits: (f * m..(f + 1) * m).rev().collect(),
            feature: f,
            hamiltonian: hamiltonians[f].clone(),
        })
        .collect();
    let layer = Layer {
        trainable: TrainableBlock::Fixed(householder_prep(&gamma)),
        encoding: EncodingSpec::Diagonal { blocks },
    };
    let model = CircuitModel::new(
        n_qubits,
        n_features,
        1.0,
        vec![layer],
        TrainableBlock::Fixed(ComplexMatrix::identity(dim)),
        Observable::Dense(observable.clone()),
    )?;
    Ok(UniversalModel { qubits_per_feature: m, gamma, observable, hamiltonians, selection, model })
}

/// For each canonical `n ∈ {−K, …, K}^N`, the lexicographically smallest
/// `(j, k)` with `λ_j − λ_k = n`; `n = 0` takes `(0, 0)`.
fn select_pairs(n_features: usize, m: usize, degree: u32) -> Vec<(Vec<i64>, usize, usize)> {
    let dim = 1usize << (m * n_features);
    let k_deg = degree as i64;
    let base = 2 * degree as usize + 1;
    let n_freqs = base.pow(n_features as u32);
    let mask = (1usize << m) - 1;
    // λ_f(b) = m/2 − popcount of feature f's bits, so λ_j − λ_k = p(k) − p(j)
    let pops: Vec<Vec<i64>> = (0..dim)
        .map(|b| (0..n_features).map(|f| ((b >> (f * m)) & mask).count_ones() as i64).collect())
        .collect();
    let decode = |mut idx: usize| -> Vec<i64> {
        (0..n_features)
            .map(|_| {
                let v = (idx % base) as i64 - k_deg;
                idx /= base;
                v
            })
            .collect()
    };
    let mut chosen: Vec<Option<(usize, usize)>> = vec![None; n_freqs];
    let zero_idx = (0..n_features).fold(0, |acc, _| acc * base + degree as usize);
    chosen[zero_idx] = Some((0, 0));
    let wanted = (0..n_freqs).filter(|&i| is_canonical(&decode(i))).count();
    let mut found = 1;
    'outer: for j in 0..dim {
        for k in 0..dim {
            let n: Vec<i64> = pops[k].iter().zip(&pops[j]).map(|(a, b)| a - b).collect();
            if n.iter().any(|v| v.abs() > k_deg) || !is_canonical(&n) {
                continue;
            }
            let idx = n.iter().rev().fold(0, |acc, &v| acc * base + (v + k_deg) as usize);
            if chosen[idx].is_none() {
                chosen[idx] = Some((j, k));
                found += 1;
                if found == wanted {
                    break 'outer;
                }
            }
        }
    }
    (0..n_freqs)
        .filter_map(|i| chosen[i].map(|(j, k)| (decode(i), j, k)))
        .collect()
}

/// Householder reflection sending `|0…0⟩` to `|Γ⟩` (real, nonnegative `γ_0`).
fn householder_prep(gamma: &[Complex64]) -> ComplexMatrix {
    let dim = gamma.len();
    let mut v: Vec<Complex64> = gamma.iter().map(|g| -g).collect();
    v[0] += 1.0;
    let vv: f64 = v.iter().map(|a| a.norm_sqr()).sum();
    let mut w = ComplexMatrix::identity(dim);
    if vv > 0.0 {
        for i in 0..dim {
            for j in 0..dim {
                w[(i, j)] -= v[i] * v[j].conj() * (2.0 / vv);
            }
        }
    }
    w
}

/// Largest `|f(x) − g(x)|` over `n_points` seeded uniform inputs in `[0, 2π)^N`.
pub fn verify_universal(
    built: &UniversalModel,
    target: &TargetSeries,
    n_points: usize,
    seed: u64,
) -> Result<f64, UniversalError> {
    if built.model.n_features() != target.n_features {
        return Err(UniversalError::InvalidTarget(format!(
            "model has {} feature(s), target {}",
            built.model.n_features(),
            target.n_features
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n_points {
        let x: Vec<f64> = (0..target.n_features).map(|_| rng.gen_range(0.0..TAU)).collect();
        let f = built.model.evaluate(&[], &x)?;
        worst = worst.max((f - target.evaluate(&x)).abs());
    }
    Ok(worst)
}
