//! The `fourier-qml` command line.
//!
//! Exit codes: 0 success, 2 malformed arguments or input documents, 3
//! incommensurable spectrum under `--rescale`, 4 path expansion too large,
//! 5 invalid training setup, 6 simulator dimension cap, 1 anything else
//! (including a failed universal verification).

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::document::{
    observable_document, DocumentError, FitOutputDocument, ModelSpecDocument, ParamsDocument, StateDocument,
    TargetDocument,
};
use crate::fourier::{coefficients_dft, coefficients_exact, dft_spectrum, FourierError};
use crate::output;
use crate::sampling::{self, SamplingError};
use crate::simulator::{Ansatz, AnsatzKind, CircuitModel, SimError};
use crate::spectra::{
    frequency_spectrum, parallel_pauli_spectrum, rescale_to_integer, sequential_pauli_spectrum, spectrum_size_bound,
    EncodingHamiltonian, FrequencySpectrum, SpectrumError,
};
use crate::training::{self, Dataset, GradientMethod, TrainConfig, TrainError};
use crate::universal::{build_universal_model, verify_universal, UniversalError};

/// Largest accepted number of parallel Pauli encodings in `spectrum`.
pub const MAX_SPECTRUM_REPETITIONS: usize = 20;
/// Universal verification threshold on the largest pointwise error.
pub const UNIVERSAL_TOL: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(name = "fourier-qml", version, about = "Fourier analysis of data re-uploading quantum models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Frequency spectrum of an encoding as JSON.
    Spectrum(SpectrumArgs),
    /// Fourier coefficients of a model as CSV.
    Coeffs(CoeffsArgs),
    /// Train a model on a target series.
    Fit(FitArgs),
    /// Build a model realising a target series exactly.
    Universal(UniversalArgs),
    /// Coefficients of randomly initialised models as CSV.
    SampleCoeffs(SampleArgs),
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["eigenvalues", "pauli_parallel", "pauli_sequential"])))]
pub struct SpectrumArgs {
    /// Generator eigenvalues, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub eigenvalues: Option<Vec<f64>>,
    /// Number of encoding repetitions for `--eigenvalues`.
    #[arg(long, default_value_t = 1, requires = "eigenvalues")]
    pub layers: usize,
    /// `r` single-qubit Pauli encodings in parallel.
    #[arg(long)]
    pub pauli_parallel: Option<usize>,
    /// `r` single-qubit Pauli encodings in sequence.
    #[arg(long)]
    pub pauli_sequential: Option<usize>,
    /// Rewrite the spectrum as integer multiples of a base frequency.
    #[arg(long)]
    pub rescale: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Exact,
    Dft,
}

#[derive(Debug, Args)]
pub struct CoeffsArgs {
    /// Model spec JSON.
    pub model: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Exact)]
    pub method: Method,
    /// Parameter JSON; overrides `params` in the model file.
    #[arg(long)]
    pub params: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GradientArg {
    ParameterShift,
    CentralDifference,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Model spec JSON.
    pub model: PathBuf,
    /// Target series JSON.
    pub target: PathBuf,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    #[arg(long, default_value_t = 0.3)]
    pub lr: f64,
    /// Minibatch size; defaults to the full dataset.
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long, default_value_t = 3)]
    pub restarts: usize,
    /// Equidistant sample points per feature.
    #[arg(long, default_value_t = training::DEFAULT_POINTS)]
    pub points: usize,
    #[arg(long, value_enum, default_value_t = GradientArg::ParameterShift)]
    pub gradient: GradientArg,
    /// Loss history CSV output.
    #[arg(long, default_value = "loss.csv")]
    pub loss_out: PathBuf,
    /// Best parameters JSON output.
    #[arg(long, default_value = "params.json")]
    pub params_out: PathBuf,
}

#[derive(Debug, Args)]
pub struct UniversalArgs {
    /// Target series JSON.
    pub target: PathBuf,
    /// Directory for `gamma.json`, `observable.json` and `model.json`.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Random points used for verification.
    #[arg(long, default_value_t = 200)]
    pub points: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long, value_parser = parse_circuit)]
    pub circuit: AnsatzKind,
    #[arg(long, default_value_t = 1)]
    pub sublayers: usize,
    /// Number of qubits, one `R_x` encoding each.
    #[arg(long, default_value_t = 3)]
    pub qubits: usize,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = sampling::DEFAULT_MAX_FREQ)]
    pub max_freq: u32,
    /// Also write per-frequency statistics to this CSV file.
    #[arg(long)]
    pub stats: Option<PathBuf>,
}

fn parse_circuit(s: &str) -> Result<AnsatzKind, String> {
    s.parse().map_err(|_| format!("unknown circuit `{s}`, expected A or B"))
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Document { path: PathBuf, source: DocumentError },
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error(transparent)]
    Fourier(#[from] FourierError),
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error(transparent)]
    Universal(#[from] UniversalError),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error("verification failed: max error {0:.3e} exceeds {UNIVERSAL_TOL:e}")]
    Verification(f64),
    #[error("writing output: {0}")]
    Output(#[from] std::io::Error),
}

fn sim_code(e: &SimError) -> i32 {
    match e {
        SimError::TooManyQubits { .. } => 6,
        _ => 1,
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Read { .. } => 2,
            CliError::Document { source: DocumentError::Model(SimError::TooManyQubits { .. }), .. } => 6,
            CliError::Document { .. } => 2,
            CliError::Spectrum(SpectrumError::Incommensurable { .. }) => 3,
            CliError::Spectrum(_) => 2,
            CliError::Fourier(FourierError::TooManyPaths { .. }) => 4,
            CliError::Fourier(FourierError::Sim(e)) => sim_code(e),
            CliError::Fourier(FourierError::NonIntegerSpectrum) => 2,
            CliError::Fourier(_) => 1,
            CliError::Train(TrainError::Sim(SimError::TooManyQubits { .. })) => 6,
            CliError::Train(_) => 5,
            CliError::Universal(UniversalError::DimensionCap { .. }) => 6,
            CliError::Universal(UniversalError::InvalidTarget(_)) => 2,
            CliError::Universal(UniversalError::Sim(e)) => sim_code(e),
            CliError::Universal(_) => 1,
            CliError::Sampling(SamplingError::ZeroSamples) => 2,
            CliError::Sampling(SamplingError::Sim(e)) => sim_code(e),
            CliError::Sampling(_) => 1,
            CliError::Verification(_) | CliError::Write { .. } | CliError::Output(_) => 1,
        }
    }
}

/// Parses `args` (including the program name) and runs the command, writing
/// results to `out`. Help and version requests are written to `out` too.
pub fn run_from<I, T>(args: I, out: &mut dyn Write) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli, out),
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            write!(out, "{e}")?;
            Ok(())
        }
        Err(e) => Err(CliError::Usage(e.to_string().trim_end().to_string())),
    }
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Spectrum(a) => cmd_spectrum(&a, out),
        Command::Coeffs(a) => cmd_coeffs(&a, out),
        Command::Fit(a) => cmd_fit(&a, out),
        Command::Universal(a) => cmd_universal(&a, out),
        Command::SampleCoeffs(a) => cmd_sample_coeffs(&a, out),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_owned(), source })
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Write { path: path.to_owned(), source })
}

fn document<T>(path: &Path, parse: impl FnOnce(&str) -> Result<T, DocumentError>) -> Result<T, CliError> {
    parse(&read(path)?).map_err(|source| CliError::Document { path: path.to_owned(), source })
}

/// Integral values serialise as JSON integers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
enum Number {
    Int(i64),
    Real(f64),
}

impl From<f64> for Number {
    fn from(v: f64) -> Self {
        if v.fract() == 0.0 && v.abs() < 1e15 {
            Number::Int(v as i64)
        } else {
            Number::Real(v)
        }
    }
}

#[derive(Debug, Serialize)]
struct SpectrumReport {
    omega: Vec<Number>,
    #[serde(rename = "K")]
    k: usize,
    #[serde(rename = "D")]
    d: Number,
    /// `None` when `d^{2L}` overflows.
    bound: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    omega0: Option<f64>,
}

fn cmd_spectrum(a: &SpectrumArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let check_r = |r: usize| {
        if r == 0 || r > MAX_SPECTRUM_REPETITIONS {
            Err(CliError::Usage(format!("repetitions must lie in 1..={MAX_SPECTRUM_REPETITIONS}, got {r}")))
        } else {
            Ok(r)
        }
    };
    let (spectrum, d, layers) = if let Some(eig) = &a.eigenvalues {
        let h = EncodingHamiltonian::new(eig.clone())?;
        (frequency_spectrum(&h, a.layers)?, eig.len() as u64, a.layers)
    } else if let Some(r) = a.pauli_parallel {
        let r = check_r(r)?;
        (parallel_pauli_spectrum(r)?, 1u64 << r, 1)
    } else {
        let r = check_r(a.pauli_sequential.expect("argument group is required"))?;
        (sequential_pauli_spectrum(r)?, 2, r)
    };
    let bound = u32::try_from(layers).ok().and_then(|l| spectrum_size_bound(d, l).ok());
    let (spectrum, omega0): (FrequencySpectrum, _) = if a.rescale {
        let (base, ints) = rescale_to_integer(&spectrum)?;
        (ints, Some(base))
    } else {
        (spectrum, None)
    };
    let report = SpectrumReport {
        omega: spectrum.frequencies().iter().map(|&w| w.into()).collect(),
        k: spectrum.size(),
        d: spectrum.degree().into(),
        bound,
        omega0,
    };
    writeln!(out, "{}", serde_json::to_string(&report).expect("plain data serialises"))?;
    Ok(())
}

fn load_model(path: &Path) -> Result<(CircuitModel, Option<Vec<f64>>), CliError> {
    let doc = document(path, ModelSpecDocument::parse)?;
    let model = doc.build().map_err(|source| CliError::Document { path: path.to_owned(), source })?;
    Ok((model, doc.params))
}

fn cmd_coeffs(a: &CoeffsArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (model, inline) = load_model(&a.model)?;
    let params = match &a.params {
        Some(p) => document(p, ParamsDocument::parse)?,
        None => match inline {
            Some(p) => p,
            None if model.param_count() == 0 => Vec::new(),
            None => {
                return Err(CliError::Usage(format!(
                    "model has {} parameters; supply them in the model file or with --params",
                    model.param_count()
                )))
            }
        },
    };
    if params.len() != model.param_count() {
        return Err(CliError::Usage(format!(
            "model has {} parameters, got {}",
            model.param_count(),
            params.len()
        )));
    }
    let coeffs = match a.method {
        Method::Exact => coefficients_exact(&model, &params)?,
        Method::Dft => coefficients_dft(&model, &params, &dft_spectrum(&model)?)?,
    };
    out.write_all(output::coefficients_csv(&coeffs).as_bytes())?;
    Ok(())
}

fn cmd_fit(a: &FitArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (model, _) = load_model(&a.model)?;
    let target = document(&a.target, |t| TargetDocument::parse(t)?.build())?;
    if target.n_features() != model.n_features() {
        return Err(TrainError::InvalidDataset(format!(
            "target has {} feature(s), model {}",
            target.n_features(),
            model.n_features()
        ))
        .into());
    }
    let data = Dataset::from_target(&target, a.points)?;
    let config = TrainConfig {
        learning_rate: a.lr,
        max_steps: a.steps,
        batch_size: a.batch_size.unwrap_or(data.len()),
        seed: a.seed,
        restarts: a.restarts,
        gradient: match a.gradient {
            GradientArg::ParameterShift => GradientMethod::ParameterShift,
            GradientArg::CentralDifference => GradientMethod::CentralDifference,
        },
    };
    let (state, report) = training::fit(&model, &data, &config)?;
    let final_mse = report.best_loss();
    write_file(&a.loss_out, &training::loss_csv(&state.history))?;
    let doc = FitOutputDocument { params: state.params, final_mse, seed: a.seed, best_restart: report.best_restart };
    write_file(&a.params_out, &json(&doc))?;
    writeln!(out, "final_mse,{}", output::real(final_mse))?;
    Ok(())
}

fn cmd_universal(a: &UniversalArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let target = document(&a.target, |t| TargetDocument::parse(t)?.build())?;
    let built = build_universal_model(&target)?;
    let max_error = verify_universal(&built, &target, a.points, a.seed)?;
    std::fs::create_dir_all(&a.out_dir).map_err(|source| CliError::Write { path: a.out_dir.clone(), source })?;
    write_file(&a.out_dir.join("gamma.json"), &json(&StateDocument::new(&built.gamma)))?;
    write_file(&a.out_dir.join("observable.json"), &json(&observable_document(&built.observable)))?;
    write_file(&a.out_dir.join("model.json"), &json(&ModelSpecDocument::from_model(&built.model, None)))?;
    writeln!(out, "n_qubits,{}", built.model.n_qubits())?;
    writeln!(out, "qubits_per_feature,{}", built.qubits_per_feature)?;
    writeln!(out, "max_error,{}", output::real(max_error))?;
    if max_error > UNIVERSAL_TOL {
        return Err(CliError::Verification(max_error));
    }
    Ok(())
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serialises") + "\n"
}

fn cmd_sample_coeffs(a: &SampleArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let ansatz = Ansatz::new(a.circuit, a.sublayers);
    let samples = sampling::sample_coefficients(ansatz, a.qubits, a.samples, a.seed, a.max_freq)?;
    if let Some(path) = &a.stats {
        let stats = sampling::coefficient_stats(&samples, a.max_freq)?;
        write_file(path, &sampling::stats_csv(&stats))?;
    }
    out.write_all(sampling::samples_csv(&samples, a.max_freq).as_bytes())?;
    Ok(())
}
