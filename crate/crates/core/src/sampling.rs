//! Fourier coefficients of randomly initialised single-layer models with
//! parallel `R_x` encodings, and per-frequency statistics over many draws.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::fourier::{coefficients_dft, FourierCoefficients, FourierError};
use crate::output;
use crate::simulator::{Ansatz, CircuitModel, Observable, PauliAxis, SimError, TrainableBlock};
use crate::spectra::FrequencySpectrum;

/// Number of reported coefficients is `max_freq + 1`; six by default.
pub const DEFAULT_MAX_FREQ: u32 = 5;
/// Coefficients below this in every sample are flagged as structural zeros.
pub const STRUCTURAL_ZERO_TOL: f64 = 1e-10;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum SamplingError {
    #[error("no samples to summarise")]
    EmptySamples,
    #[error("at least one sample is required")]
    ZeroSamples,
    #[error("samples do not share a frequency grid")]
    InconsistentSamples,
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Fourier(#[from] FourierError),
}

/// The sampled model: `W(θ₂) · ⊗R_x(x) · W(θ₁)` on `n_qubits` qubits with `σ_z` on qubit 0.
pub fn sampling_model(ansatz: Ansatz, n_qubits: usize) -> Result<CircuitModel, SimError> {
    CircuitModel::parallel_pauli(n_qubits, PauliAxis::X, TrainableBlock::Ansatz(ansatz), Observable::PauliZ { qubit: 0 })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSample {
    pub ansatz: Ansatz,
    pub n_qubits: usize,
    pub seed: u64,
    pub index: usize,
    /// `c_n` for `|n| ≤ max(r, max_freq)`.
    pub coefficients: FourierCoefficients,
}

impl CoefficientSample {
    /// Extraction at given parameters.
    pub fn at_params(ansatz: Ansatz, n_qubits: usize, params: &[f64], max_freq: u32) -> Result<FourierCoefficients, SamplingError> {
        let model = sampling_model(ansatz, n_qubits)?;
        let degree = (n_qubits as u32).max(max_freq);
        Ok(coefficients_dft(&model, params, &FrequencySpectrum::truncated(degree))?.cleaned())
    }
}

/// Draws `n_samples` parameter vectors uniformly in `[0, 2π)` (sample `i` uses
/// stream `i` of a ChaCha8 generator seeded with `seed`) and extracts the
/// coefficients of each model.
pub fn sample_coefficients(
    ansatz: Ansatz,
    n_qubits: usize,
    n_samples: usize,
    seed: u64,
    max_freq: u32,
) -> Result<Vec<CoefficientSample>, SamplingError> {
    if n_samples == 0 {
        return Err(SamplingError::ZeroSamples);
    }
    let model = sampling_model(ansatz, n_qubits)?;
    let n_params = model.param_count();
    (0..n_samples)
        .into_par_iter()
        .map(|index| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(index as u64);
            let params = crate::random::angles(&mut rng, n_params);
            let coefficients = CoefficientSample::at_params(ansatz, n_qubits, &params, max_freq)?;
            Ok(CoefficientSample { ansatz, n_qubits, seed, index, coefficients })
        })
        .collect()
}

/// Summary of one frequency over all samples; variances are population
/// variances (zero for a single sample).
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyStats {
    pub freq: f64,
    pub mean_re: f64,
    pub mean_im: f64,
    pub var_re: f64,
    pub var_im: f64,
    pub max_abs: f64,
    pub structural_zero: bool,
}

/// Statistics for `n = 0..=max_freq`.
pub fn coefficient_stats(samples: &[CoefficientSample], max_freq: u32) -> Result<Vec<FrequencyStats>, SamplingError> {
    let first = samples.first().ok_or(SamplingError::EmptySamples)?;
    let grid: Vec<&[f64]> = first.coefficients.iter().map(|(w, _)| w).collect();
    for s in samples {
        if !s.coefficients.iter().map(|(w, _)| w).eq(grid.iter().copied()) {
            return Err(SamplingError::InconsistentSamples);
        }
    }
    let count = samples.len() as f64;
    Ok((0..=max_freq)
        .map(|n| {
            let values: Vec<_> = samples.iter().map(|s| s.coefficients.coefficient(n as f64)).collect();
            let mean_re = values.iter().map(|c| c.re).sum::<f64>() / count;
            let mean_im = values.iter().map(|c| c.im).sum::<f64>() / count;
            let var_re = values.iter().map(|c| (c.re - mean_re).powi(2)).sum::<f64>() / count;
            let var_im = values.iter().map(|c| (c.im - mean_im).powi(2)).sum::<f64>() / count;
            let max_abs = values.iter().map(|c| c.norm()).fold(0.0, f64::max);
            FrequencyStats {
                freq: n as f64,
                mean_re,
                mean_im,
                var_re,
                var_im,
                max_abs,
                structural_zero: max_abs < STRUCTURAL_ZERO_TOL,
            }
        })
        .collect())
}

/// CSV `sample_index,freq,re,im` for `n = 0..=max_freq`.
pub fn samples_csv(samples: &[CoefficientSample], max_freq: u32) -> String {
    let mut out = String::from("sample_index,freq,re,im\n");
    for s in samples {
        for n in 0..=max_freq {
            let c = s.coefficients.coefficient(n as f64);
            out.push_str(&format!("{},{n},{},{}\n", s.index, output::real(c.re), output::real(c.im)));
        }
    }
    out
}

/// CSV `freq,mean_re,mean_im,var_re,var_im,max_abs,structural_zero`.
pub fn stats_csv(stats: &[FrequencyStats]) -> String {
    let mut out = String::from("freq,mean_re,mean_im,var_re,var_im,max_abs,structural_zero\n");
    for s in stats {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            output::frequency(s.freq),
            output::real(s.mean_re),
            output::real(s.mean_im),
            output::real(s.var_re),
            output::real(s.var_im),
            output::real(s.max_abs),
            s.structural_zero
        ));
    }
    out
}
