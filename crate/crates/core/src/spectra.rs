//! Frequency spectra of data-encoding Hamiltonians.
//!
//! A model that encodes `x` through `L` repetitions of `e^{-ixH}` can only
//! contain the frequencies `Λ_k − Λ_j`, where each `Λ` is a sum of `L`
//! eigenvalues of `H`. Everything here is pure combinatorics on eigenvalue
//! lists.
//!
//! Frequencies are real numbers, so set membership uses a snapping rule: two
//! values are the same frequency when `|a − b| ≤ 1e-9·max(1, |a|, |b|)`. When
//! every member of a set lies within that tolerance of an integer, the set is
//! stored as exact integers so comparisons downstream are exact.

use std::cmp::Ordering;
use std::fmt;

pub const SNAP_TOL: f64 = 1e-9;
pub const RATIONAL_DENOMINATOR_CAP: u64 = 1_000_000;
pub const RATIONAL_RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum SpectrumError {
    #[error("an encoding Hamiltonian needs at least one eigenvalue")]
    EmptyHamiltonian,
    #[error("eigenvalue {index} is not finite ({value})")]
    NonFiniteEigenvalue { index: usize, value: f64 },
    #[error("number of encoding repetitions must be at least 1")]
    ZeroRepetitions,
    #[error("d^(2L) overflows for d = {d}, L = {layers}")]
    Overflow { d: u64, layers: u32 },
    #[error("frequencies {a} and {b} are not commensurable within the denominator cap")]
    Incommensurable { a: f64, b: f64 },
}

/// Whether two frequencies are identified under the snapping rule.
pub fn snap_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= SNAP_TOL * 1f64.max(a.abs()).max(b.abs())
}

fn nearest_integer(v: f64) -> Option<f64> {
    let r = v.round();
    snap_eq(v, r).then_some(r)
}

/// Sorts and deduplicates `values` under the snapping rule. Clusters are
/// represented by their smallest member; the whole set is replaced by exact
/// integers if every representative snaps to one.
pub fn snap_set(mut values: Vec<f64>) -> Vec<f64> {
    values.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(values.len());
    let mut anchor = f64::NAN;
    for v in values {
        if out.is_empty() || !snap_eq(anchor, v) {
            out.push(v);
            anchor = v;
        }
    }
    if let Some(ints) = out.iter().map(|&v| nearest_integer(v)).collect::<Option<Vec<_>>>() {
        out = ints;
        out.dedup();
    }
    for v in &mut out {
        if *v == 0.0 {
            *v = 0.0; // normalise -0.0
        }
    }
    out
}

/// Eigenvalues `λ_1..λ_d` of a diagonal (or diagonalised) data-encoding generator.
///
/// Degenerate eigenvalues are kept: the multiplicity matters for coefficient
/// extraction even though it does not change the spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodingHamiltonian {
    eigenvalues: Vec<f64>,
}

impl EncodingHamiltonian {
    pub fn new(eigenvalues: Vec<f64>) -> Result<Self, SpectrumError> {
        if eigenvalues.is_empty() {
            return Err(SpectrumError::EmptyHamiltonian);
        }
        if let Some((index, &value)) = eigenvalues.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(SpectrumError::NonFiniteEigenvalue { index, value });
        }
        Ok(Self { eigenvalues })
    }

    /// Generator `σ/2` of a single-qubit Pauli rotation, in its eigenbasis.
    pub fn pauli() -> Self {
        Self { eigenvalues: vec![0.5, -0.5] }
    }

    /// `Σ_i σ_z^{(i)}/2` on `n` qubits, listed in computational-basis order
    /// (qubit 0 is the least significant bit, `|0⟩` carries `+1/2`).
    pub fn pauli_sum(n_qubits: usize) -> Self {
        let eigenvalues = (0..1usize << n_qubits)
            .map(|b| n_qubits as f64 / 2.0 - b.count_ones() as f64)
            .collect();
        Self { eigenvalues }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }
}

/// The set Ω of frequencies a model can express.
///
/// Always contains 0, is closed under negation and therefore has odd size.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencySpectrum {
    frequencies: Vec<f64>,
}

impl FrequencySpectrum {
    /// Builds Ω from an arbitrary collection of differences. Only magnitudes are
    /// used, so the result is symmetric by construction.
    pub fn from_differences<I: IntoIterator<Item = f64>>(diffs: I) -> Self {
        let mut mags: Vec<f64> = diffs.into_iter().map(f64::abs).collect();
        mags.push(0.0);
        let mags = snap_set(mags);
        // the zero cluster is always first: its anchor is exactly 0.0
        let positive: Vec<f64> = mags.into_iter().filter(|&v| v > 0.0).collect();
        let mut frequencies: Vec<f64> = positive.iter().rev().map(|v| -v).collect();
        frequencies.push(0.0);
        frequencies.extend(positive);
        Self { frequencies }
    }

    /// `{-r, …, r}`.
    pub fn truncated(degree: u32) -> Self {
        let r = degree as i64;
        Self {
            frequencies: (-r..=r).map(|n| n as f64).collect(),
        }
    }

    pub fn from_integers(ints: &[i64]) -> Self {
        Self::from_differences(ints.iter().map(|&n| n as f64))
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    /// Number of independent nonzero frequencies, `(|Ω| − 1)/2`.
    pub fn size(&self) -> usize {
        (self.frequencies.len() - 1) / 2
    }

    /// Largest frequency.
    pub fn degree(&self) -> f64 {
        *self.frequencies.last().expect("spectrum always contains 0")
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_integer(&self) -> bool {
        self.frequencies.iter().all(|v| v.fract() == 0.0)
    }

    pub fn integers(&self) -> Option<Vec<i64>> {
        self.is_integer()
            .then(|| self.frequencies.iter().map(|&v| v as i64).collect())
    }

    pub fn contains(&self, omega: f64) -> bool {
        self.frequencies
            .binary_search_by(|probe| {
                if snap_eq(*probe, omega) {
                    Ordering::Equal
                } else {
                    probe.total_cmp(&omega)
                }
            })
            .is_ok()
    }

    pub fn is_subset_of(&self, other: &FrequencySpectrum) -> bool {
        self.frequencies.iter().all(|&w| other.contains(w))
    }
}

impl fmt::Display for FrequencySpectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, w) in self.frequencies.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{w}")?;
        }
        write!(f, "}}")
    }
}

/// The `L`-fold sumset `{λ_{j_1} + … + λ_{j_L}}` of the eigenvalues.
pub fn sum_spectrum(h: &EncodingHamiltonian, layers: usize) -> Result<Vec<f64>, SpectrumError> {
    if layers == 0 {
        return Err(SpectrumError::ZeroRepetitions);
    }
    let eig = snap_set(h.eigenvalues.clone());
    let mut sums = eig.clone();
    for _ in 1..layers {
        let next = sums
            .iter()
            .flat_map(|&s| eig.iter().map(move |&e| s + e))
            .collect();
        sums = snap_set(next);
    }
    Ok(sums)
}

/// Ω = {Λ_k − Λ_j} for `L` repetitions of the encoding generator.
pub fn frequency_spectrum(h: &EncodingHamiltonian, layers: usize) -> Result<FrequencySpectrum, SpectrumError> {
    let sums = sum_spectrum(h, layers)?;
    Ok(FrequencySpectrum::from_differences(
        sums.iter().flat_map(|&a| sums.iter().map(move |&b| a - b)),
    ))
}

/// `r` single-qubit Pauli rotations acting on distinct qubits in one layer.
pub fn parallel_pauli_spectrum(r: usize) -> Result<FrequencySpectrum, SpectrumError> {
    if r == 0 {
        return Err(SpectrumError::ZeroRepetitions);
    }
    // all sums of r values ±1/2, i.e. the spectrum of Σ σ^{(q)}/2
    let mut eig = vec![0.0];
    for _ in 0..r {
        eig = eig.iter().flat_map(|&s| [s + 0.5, s - 0.5]).collect();
    }
    frequency_spectrum(&EncodingHamiltonian::new(eig)?, 1)
}

/// One single-qubit Pauli rotation repeated in `r` sequential layers.
pub fn sequential_pauli_spectrum(r: usize) -> Result<FrequencySpectrum, SpectrumError> {
    frequency_spectrum(&EncodingHamiltonian::pauli(), r)
}

/// Upper bound `⌊d^{2L}/2⌋ − 1` on the spectrum size (clamped at zero).
pub fn spectrum_size_bound(d: u64, layers: u32) -> Result<u64, SpectrumError> {
    if d == 0 || layers == 0 {
        return Err(SpectrumError::ZeroRepetitions);
    }
    let total = layers
        .checked_mul(2)
        .and_then(|e| d.checked_pow(e))
        .ok_or(SpectrumError::Overflow { d, layers })?;
    Ok((total / 2).saturating_sub(1))
}

/// Best rational approximation `p/q` of `x ≥ 0` with `q ≤ cap` such that
/// `|q·x − p| ≤ tol·max(1, x)`, searched along continued-fraction convergents.
fn rational_multiple(x: f64, cap: u64, tol: f64) -> Option<(u64, u64)> {
    let (mut h_prev, mut h) = (1u128, x.floor() as u128);
    let (mut k_prev, mut k) = (0u128, 1u128);
    let mut frac = x - x.floor();
    loop {
        if k > cap as u128 {
            return None;
        }
        if (k as f64 * x - h as f64).abs() <= tol * x.max(1.0) {
            return Some((h as u64, k as u64));
        }
        if frac <= f64::EPSILON {
            return None;
        }
        let inv = 1.0 / frac;
        let a = inv.floor();
        frac = inv - a;
        let a = a as u128;
        let h_next = a.checked_mul(h)?.checked_add(h_prev)?;
        let k_next = a.checked_mul(k)?.checked_add(k_prev)?;
        h_prev = h;
        h = h_next;
        k_prev = k;
        k = k_next;
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Rewrites a commensurable spectrum as integer multiples of the largest base
/// frequency `ω₀`. Returns `(ω₀, {n})` with `ω = n·ω₀` for every member.
///
/// A frequency ratio is accepted when some denominator `q ≤ 10⁶` brings it
/// within `1e-9` of an integer lattice point, i.e. the residual is measured in
/// units of the resulting base frequency.
pub fn rescale_to_integer(spec: &FrequencySpectrum) -> Result<(f64, FrequencySpectrum), SpectrumError> {
    let positive: Vec<f64> = spec.frequencies.iter().copied().filter(|&w| w > 0.0).collect();
    let Some(&smallest) = positive.first() else {
        return Ok((1.0, FrequencySpectrum::truncated(0)));
    };
    let mut lcm: u64 = 1;
    let mut ratios = Vec::with_capacity(positive.len());
    for &w in &positive {
        let ratio = w / smallest;
        let (_, q) = rational_multiple(ratio, RATIONAL_DENOMINATOR_CAP, RATIONAL_RESIDUAL_TOL)
            .ok_or(SpectrumError::Incommensurable { a: smallest, b: w })?;
        lcm = lcm / gcd(lcm, q) * q;
        if lcm > RATIONAL_DENOMINATOR_CAP {
            return Err(SpectrumError::Incommensurable { a: smallest, b: w });
        }
        ratios.push(ratio);
    }
    let mut multiples: Vec<u64> = ratios.iter().map(|r| (r * lcm as f64).round() as u64).collect();
    for (&r, &n) in ratios.iter().zip(&multiples) {
        if (r * lcm as f64 - n as f64).abs() > RATIONAL_RESIDUAL_TOL * r.max(1.0) * lcm as f64 {
            return Err(SpectrumError::Incommensurable { a: smallest, b: r * smallest });
        }
    }
    let g = multiples.iter().copied().fold(0, gcd);
    for n in &mut multiples {
        *n /= g;
    }
    let base = smallest * g as f64 / lcm as f64;
    let ints: Vec<i64> = multiples.iter().map(|&n| n as i64).collect();
    Ok((base, FrequencySpectrum::from_integers(&ints)))
}
