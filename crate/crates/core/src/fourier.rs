//! Fourier representation `f(x) = Σ_ω c_ω e^{iω·x}` of a model.
//!
//! Two independent extraction routes are provided. [`coefficients_exact`]
//! expands the circuit into path amplitudes and groups them by frequency.
//! [`coefficients_dft`] samples the model on an equidistant grid and applies a
//! discrete Fourier transform, which is exact for integer spectra.
//! Frequencies are always expressed in the raw input (input scale included).

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::linalg::ComplexMatrix;
use crate::simulator::{CircuitModel, SimError};
use crate::spectra::{snap_eq, snap_set, EncodingHamiltonian, FrequencySpectrum, SpectrumError};

/// Upper bound on `d^{2L}` for path-amplitude extraction.
pub const MAX_PATH_PAIRS: u64 = 1_000_000;
/// Coefficients below this magnitude are reported as exact zeros.
pub const ZERO_TOL: f64 = 1e-12;
/// Allowed deviation from `c_{−ω} = c_ω*`.
pub const SYMMETRY_TOL: f64 = 1e-10;
pub const MAX_MULTIVARIATE_FEATURES: usize = 3;
pub const MAX_MULTIVARIATE_DIM: usize = 1 << 12;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum FourierError {
    #[error("path expansion needs {pairs} amplitude pairs, above the cap of {cap}")]
    TooManyPaths { pairs: String, cap: u64 },
    #[error("spectrum is not integer-valued; rescale the input first")]
    NonIntegerSpectrum,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("coefficients are not conjugate-symmetric at frequency {freq:?} (deviation {deviation:.3e})")]
    AsymmetricCoefficients { freq: Vec<f64>, deviation: f64 },
    #[error("frequency grids do not match: {0}")]
    GridMismatch(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
}

/// Frequency vector used as a map key; ordered lexicographically with
/// `f64::total_cmp`, and `−0.0` normalised to `0.0`.
#[derive(Debug, Clone)]
pub struct Frequency(Vec<f64>);

impl Frequency {
    pub fn new(mut components: Vec<f64>) -> Self {
        for c in &mut components {
            if *c == 0.0 {
                *c = 0.0;
            }
        }
        Self(components)
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn negated(&self) -> Self {
        Self::new(self.0.iter().map(|c| -c).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0.0)
    }

    fn snap_matches(&self, other: &[f64]) -> bool {
        self.0.len() == other.len() && self.0.iter().zip(other).all(|(&a, &b)| snap_eq(a, b))
    }
}

impl PartialEq for Frequency {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Frequency {}

impl PartialOrd for Frequency {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Frequency {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.total_cmp(b) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

/// Coefficients `c_ω` keyed by frequency vectors of length `n_features`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoefficients {
    n_features: usize,
    entries: BTreeMap<Frequency, Complex64>,
}

impl FourierCoefficients {
    pub fn new(n_features: usize) -> Self {
        Self { n_features, entries: BTreeMap::new() }
    }

    /// Builds a table from `(frequency, coefficient)` pairs; repeated
    /// frequencies are summed.
    pub fn from_entries<I>(n_features: usize, entries: I) -> Result<Self, FourierError>
    where
        I: IntoIterator<Item = (Vec<f64>, Complex64)>,
    {
        let mut out = Self::new(n_features);
        for (freq, c) in entries {
            out.add(freq, c)?;
        }
        Ok(out)
    }

    pub fn add(&mut self, freq: Vec<f64>, c: Complex64) -> Result<(), FourierError> {
        if freq.len() != self.n_features {
            return Err(FourierError::DimensionMismatch(format!(
                "frequency of length {} for {} feature(s)",
                freq.len(),
                self.n_features
            )));
        }
        *self.entries.entry(Frequency::new(freq)).or_default() += c;
        Ok(())
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in ascending frequency order.
    pub fn iter(&self) -> impl Iterator<Item = (&[f64], Complex64)> {
        self.entries.iter().map(|(k, &v)| (k.components(), v))
    }

    /// `c_ω`, matching the frequency under the snapping rule; zero if absent.
    pub fn get(&self, freq: &[f64]) -> Complex64 {
        if let Some(c) = self.entries.get(&Frequency::new(freq.to_vec())) {
            return *c;
        }
        self.entries
            .iter()
            .find(|(k, _)| k.snap_matches(freq))
            .map(|(_, &c)| c)
            .unwrap_or_default()
    }

    /// Univariate shorthand for `get(&[omega])`.
    pub fn coefficient(&self, omega: f64) -> Complex64 {
        self.get(&[omega])
    }

    /// Copy with every `|c_ω| < 1e-12` replaced by an exact zero.
    pub fn cleaned(&self) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|(k, &c)| (k.clone(), if c.norm() < ZERO_TOL { Complex64::new(0.0, 0.0) } else { c }))
            .collect();
        Self { n_features: self.n_features, entries }
    }

    /// Frequencies carrying a coefficient of magnitude above `tol`.
    pub fn support(&self, tol: f64) -> Vec<Vec<f64>> {
        self.entries
            .iter()
            .filter(|(_, c)| c.norm() > tol)
            .map(|(k, _)| k.0.clone())
            .collect()
    }

    pub fn is_integer(&self) -> bool {
        self.entries.keys().all(|k| k.0.iter().all(|c| c.fract() == 0.0))
    }

    /// Largest `|c_{−ω} − c_ω*|` over the stored frequencies, with the frequency
    /// where it occurs.
    pub fn symmetry_deviation(&self) -> (f64, Option<Vec<f64>>) {
        let mut worst = (0.0, None);
        for (k, &c) in &self.entries {
            let dev = (self.get(&k.negated().0) - c.conj()).norm();
            if dev > worst.0 {
                worst = (dev, Some(k.0.clone()));
            }
        }
        worst
    }

    /// Whether every nonzero coefficient sits on a frequency whose component
    /// for feature `f` lies in `spectra[f]`.
    pub fn supported_by(&self, spectra: &[FrequencySpectrum], tol: f64) -> bool {
        spectra.len() == self.n_features
            && self
                .support(tol)
                .iter()
                .all(|freq| freq.iter().zip(spectra).all(|(&w, s)| s.contains(w)))
    }
}

/// Amplitudes `a_{k,j} = v_k† M v_j` over all pairs of eigenvalue paths.
/// Path `j` picks one eigenvalue index per encoding layer; its accumulated
/// eigenvalue vector is `Λ_j` and `f(x) = Σ_{k,j} a_{k,j} e^{ix·(Λ_k − Λ_j)}`.
#[derive(Debug, Clone)]
pub struct PathAmplitudeTable {
    paths: Vec<Vec<usize>>,
    lambdas: Vec<Vec<f64>>,
    amplitudes: Vec<Complex64>,
}

impl PathAmplitudeTable {
    /// Expands a model at fixed parameters. Non-diagonal encodings are
    /// diagonalised first.
    pub fn build(model: &CircuitModel, params: &[f64]) -> Result<Self, FourierError> {
        let diag = model.diagonalized(params)?;
        let d = diag.dim() as u64;
        let layers = diag.n_layers() as u32;
        let pairs = d.checked_pow(2 * layers).filter(|&p| p <= MAX_PATH_PAIRS);
        if pairs.is_none() {
            let shown = d.checked_pow(2 * layers).map_or_else(|| format!("{d}^{}", 2 * layers), |p| p.to_string());
            return Err(FourierError::TooManyPaths { pairs: shown, cap: MAX_PATH_PAIRS });
        }
        let d = d as usize;
        let n_paths = d.pow(layers);
        let n_features = diag.n_features;

        // scalar_j = W_L[j_L, j_{L−1}] … W_1[j_1, 0]; v_j = scalar_j · W_{L+1}[:, j_L]
        let mut paths = Vec::with_capacity(n_paths);
        let mut lambdas = Vec::with_capacity(n_paths);
        let mut scalars = Vec::with_capacity(n_paths);
        for idx in 0..n_paths {
            let path: Vec<usize> = (0..layers as usize).map(|l| idx / d.pow(l as u32) % d).collect();
            let mut s = Complex64::new(1.0, 0.0);
            let mut prev = 0;
            let mut lambda = vec![0.0; n_features];
            for (l, &j) in path.iter().enumerate() {
                s *= diag.blocks[l][(j, prev)];
                prev = j;
                for (acc, v) in lambda.iter_mut().zip(&diag.layer_eigenvalues[l][j]) {
                    *acc += v;
                }
            }
            paths.push(path);
            lambdas.push(lambda);
            scalars.push(s);
        }

        let last = diag.blocks.last().expect("at least one block");
        let gram = &(&last.adjoint() * &diag.observable) * last;
        let end = |p: &Vec<usize>| p.last().copied().unwrap_or(0);
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); n_paths * n_paths];
        for k in 0..n_paths {
            let ck = scalars[k].conj();
            let row = end(&paths[k]);
            for j in 0..n_paths {
                amplitudes[k * n_paths + j] = ck * scalars[j] * gram[(row, end(&paths[j]))];
            }
        }
        Ok(Self { paths, lambdas, amplitudes })
    }

    pub fn n_paths(&self) -> usize {
        self.paths.len()
    }

    /// Eigenvalue indices of path `j`, one per layer.
    pub fn path(&self, j: usize) -> &[usize] {
        &self.paths[j]
    }

    /// `Λ_j`, one entry per feature.
    pub fn lambda(&self, j: usize) -> &[f64] {
        &self.lambdas[j]
    }

    pub fn amplitude(&self, k: usize, j: usize) -> Complex64 {
        self.amplitudes[k * self.paths.len() + j]
    }

    /// Sums amplitudes that contribute to the same frequency `Λ_k − Λ_j`.
    pub fn coefficients(&self) -> FourierCoefficients {
        let n = self.paths.len();
        let n_features = self.lambdas.first().map_or(0, Vec::len);
        let raw: Vec<Vec<f64>> = (0..n_features)
            .map(|f| {
                (0..n * n)
                    .map(|idx| self.lambdas[idx / n][f] - self.lambdas[idx % n][f])
                    .collect()
            })
            .collect();
        let snapped: Vec<Vec<f64>> = raw.iter().map(|vals| snap_symmetric(vals)).collect();
        let mut out = FourierCoefficients::new(n_features);
        for idx in 0..n * n {
            let freq: Vec<f64> = snapped.iter().map(|s| s[idx]).collect();
            *out.entries.entry(Frequency::new(freq)).or_default() += self.amplitudes[idx];
        }
        out
    }
}

/// Maps every value onto a cluster representative of the snapping rule,
/// clustering on magnitudes so that `ω` and `−ω` always land on opposite keys.
fn snap_symmetric(values: &[f64]) -> Vec<f64> {
    let mut mags: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    mags.push(0.0);
    let reps = snap_set(mags);
    values
        .iter()
        .map(|&v| {
            let m = v.abs();
            let i = reps.partition_point(|&r| r < m);
            let nearest = [i.checked_sub(1), Some(i)]
                .into_iter()
                .flatten()
                .filter_map(|i| reps.get(i))
                .min_by(|a, b| (*a - m).abs().total_cmp(&(*b - m).abs()))
                .copied()
                .unwrap_or(m);
            if nearest == 0.0 {
                0.0
            } else {
                nearest.copysign(v)
            }
        })
        .collect()
}

/// Coefficients by summing path amplitudes.
pub fn coefficients_exact(model: &CircuitModel, params: &[f64]) -> Result<FourierCoefficients, FourierError> {
    Ok(PathAmplitudeTable::build(model, params)?.coefficients())
}

/// Coefficients by sampling `f` on the grid `x_t = 2πt/T`, `T = 2D + 1`, in
/// every feature and transforming. Returns `c_n` for every `n ∈ Ω^N`.
pub fn coefficients_dft(
    model: &CircuitModel,
    params: &[f64],
    spectrum: &FrequencySpectrum,
) -> Result<FourierCoefficients, FourierError> {
    let omega = spectrum.integers().ok_or(FourierError::NonIntegerSpectrum)?;
    let degree = omega.iter().map(|n| n.unsigned_abs()).max().unwrap_or(0) as usize;
    let t = 2 * degree + 1;
    let n_features = model.n_features();
    let n_points = t.checked_pow(n_features as u32).ok_or_else(|| {
        FourierError::DimensionMismatch(format!("{t}^{n_features} sample points overflow"))
    })?;
    model.check_params(params)?;

    let grid = |idx: usize| -> Vec<usize> { (0..n_features).map(|f| idx / t.pow(f as u32) % t).collect() };
    let samples: Vec<f64> = (0..n_points)
        .into_par_iter()
        .map(|idx| {
            let x: Vec<f64> = grid(idx).iter().map(|&i| TAU * i as f64 / t as f64).collect();
            model.evaluate(params, &x)
        })
        .collect::<Result<_, _>>()?;

    // per-feature twiddle table e^{−i n x_t}
    let twiddle: Vec<Vec<Complex64>> = omega
        .iter()
        .map(|&n| (0..t).map(|i| Complex64::from_polar(1.0, -TAU * (n * i as i64) as f64 / t as f64)).collect())
        .collect();
    let n_freqs = omega.len();
    let mut out = FourierCoefficients::new(n_features);
    for fidx in 0..n_freqs.pow(n_features as u32) {
        let sel: Vec<usize> = (0..n_features).map(|f| fidx / n_freqs.pow(f as u32) % n_freqs).collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for (idx, &v) in samples.iter().enumerate() {
            let g = grid(idx);
            let w: Complex64 = sel.iter().zip(&g).map(|(&s, &i)| twiddle[s][i]).product();
            acc += w * v;
        }
        let freq = sel.iter().map(|&s| omega[s] as f64).collect();
        out.entries.insert(Frequency::new(freq), acc / n_points as f64);
    }
    Ok(out)
}

/// Integer spectrum `{−D, …, D}` covering every feature of `model`, with `D`
/// the largest per-feature degree.
pub fn dft_spectrum(model: &CircuitModel) -> Result<FrequencySpectrum, FourierError> {
    let mut degree = 0;
    for s in model.feature_spectra()? {
        let ints = s.integers().ok_or(FourierError::NonIntegerSpectrum)?;
        degree = degree.max(ints.iter().map(|n| n.unsigned_abs()).max().unwrap_or(0));
    }
    Ok(FrequencySpectrum::truncated(degree as u32))
}

/// `f(x) = Σ_{j,k} γ_j* γ_k M_{jk} e^{ix·(λ_j − λ_k)}` for `|Γ⟩` evolved by
/// `e^{−ix·H}`, where feature `f`'s generator acts on its own tensor factor.
/// Feature 0 is the least significant factor of the flattened index.
pub fn coefficients_multivariate(
    gamma: &[Complex64],
    m: &ComplexMatrix,
    hams: &[EncodingHamiltonian],
) -> Result<FourierCoefficients, FourierError> {
    let n_features = hams.len();
    if n_features == 0 || n_features > MAX_MULTIVARIATE_FEATURES {
        return Err(FourierError::DimensionMismatch(format!(
            "{n_features} feature(s); between 1 and {MAX_MULTIVARIATE_FEATURES} supported"
        )));
    }
    let dim = hams.iter().try_fold(1usize, |acc, h| acc.checked_mul(h.dim()));
    let dim = match dim {
        Some(d) if d <= MAX_MULTIVARIATE_DIM => d,
        _ => {
            return Err(FourierError::DimensionMismatch(format!(
                "total dimension exceeds {MAX_MULTIVARIATE_DIM}"
            )))
        }
    };
    if gamma.len() != dim || m.rows() != dim || !m.is_square() {
        return Err(FourierError::DimensionMismatch(format!(
            "state of length {}, observable {}x{}, subsystem product {dim}",
            gamma.len(),
            m.rows(),
            m.cols()
        )));
    }
    let lambdas: Vec<Vec<f64>> = (0..dim)
        .map(|j| {
            let mut rest = j;
            hams.iter()
                .map(|h| {
                    let local = rest % h.dim();
                    rest /= h.dim();
                    h.eigenvalues()[local]
                })
                .collect()
        })
        .collect();
    let raw: Vec<Vec<f64>> = (0..n_features)
        .map(|f| (0..dim * dim).map(|idx| lambdas[idx / dim][f] - lambdas[idx % dim][f]).collect())
        .collect();
    let snapped: Vec<Vec<f64>> = raw.iter().map(|v| snap_symmetric(v)).collect();
    let mut out = FourierCoefficients::new(n_features);
    for j in 0..dim {
        for k in 0..dim {
            let idx = j * dim + k;
            let c = gamma[j].conj() * gamma[k] * m[(j, k)];
            let freq = snapped.iter().map(|s| s[idx]).collect();
            *out.entries.entry(Frequency::new(freq)).or_default() += c;
        }
    }
    Ok(out)
}

/// `Σ_ω c_ω e^{iω·x}`, after checking conjugate symmetry.
pub fn eval_series(coeffs: &FourierCoefficients, x: &[f64]) -> Result<f64, FourierError> {
    if x.len() != coeffs.n_features {
        return Err(FourierError::DimensionMismatch(format!(
            "{} input value(s) for {} feature(s)",
            x.len(),
            coeffs.n_features
        )));
    }
    let (dev, at) = coeffs.symmetry_deviation();
    if dev > SYMMETRY_TOL {
        return Err(FourierError::AsymmetricCoefficients { freq: at.unwrap_or_default(), deviation: dev });
    }
    let sum: Complex64 = coeffs
        .iter()
        .map(|(w, c)| {
            let phase: f64 = w.iter().zip(x).map(|(a, b)| a * b).sum();
            c * Complex64::from_polar(1.0, phase)
        })
        .sum();
    Ok(sum.re)
}

/// Normalised `L₂` distance `sqrt(Σ_ω |a_ω − b_ω|²)` over the union of supports.
pub fn series_distance(a: &FourierCoefficients, b: &FourierCoefficients) -> Result<f64, FourierError> {
    if a.n_features != b.n_features {
        return Err(FourierError::GridMismatch(format!(
            "{} vs {} feature(s)",
            a.n_features, b.n_features
        )));
    }
    if !(a.is_integer() && b.is_integer()) {
        let same = |p: &FourierCoefficients, q: &FourierCoefficients| {
            p.entries.keys().all(|k| q.entries.keys().any(|l| l.snap_matches(&k.0)))
        };
        if !(same(a, b) && same(b, a)) {
            return Err(FourierError::GridMismatch("non-integer frequencies differ between the series".into()));
        }
    }
    let mut total = 0.0;
    for (k, &c) in &a.entries {
        total += (c - b.get(&k.0)).norm_sqr();
    }
    for (k, &c) in &b.entries {
        if !a.entries.keys().any(|l| l.snap_matches(&k.0)) {
            total += c.norm_sqr();
        }
    }
    Ok(total.sqrt())
}
