//! Mean-squared-error fitting of model parameters with Adam.
//!
//! Gradients come from the parameter-shift rule: every trainable parameter is
//! the angle of a Pauli rotation `e^{−iθσ/2}`, so
//! `∂f/∂θ_k = [f(θ + π/2·e_k) − f(θ − π/2·e_k)] / 2` exactly.

use std::f64::consts::{FRAC_PI_2, TAU};

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::simulator::{Ansatz, AnsatzKind, CircuitModel, Observable, PauliAxis, SimError, TrainableBlock};
use crate::universal::TargetSeries;

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPS: f64 = 1e-8;
/// Step for central finite differences.
pub const FD_STEP: f64 = 1e-5;
/// Points in the equidistant univariate training grid.
pub const DEFAULT_POINTS: usize = 25;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum TrainError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    #[error("invalid training configuration: {0}")]
    InvalidConfig(String),
    #[error("parameter {param} has no generator known to the parameter-shift rule")]
    UnknownGeneratorType { param: usize },
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    inputs: Vec<Vec<f64>>,
    labels: Vec<f64>,
}

impl Dataset {
    /// Inputs must share one feature count and lie in `[0, 2π)`.
    pub fn new(inputs: Vec<Vec<f64>>, labels: Vec<f64>) -> Result<Self, TrainError> {
        if inputs.len() != labels.len() {
            return Err(TrainError::InvalidDataset(format!(
                "{} inputs but {} labels",
                inputs.len(),
                labels.len()
            )));
        }
        if let Some(first) = inputs.first() {
            for (i, x) in inputs.iter().enumerate() {
                if x.len() != first.len() {
                    return Err(TrainError::InvalidDataset(format!("input {i} has {} feature(s)", x.len())));
                }
                if x.iter().any(|v| !(0.0..TAU).contains(v)) {
                    return Err(TrainError::InvalidDataset(format!("input {i} lies outside [0, 2π)")));
                }
            }
        }
        if labels.iter().any(|y| !y.is_finite()) {
            return Err(TrainError::InvalidDataset("labels must be finite".into()));
        }
        Ok(Self { inputs, labels })
    }

    /// Samples `target` on `n_points` equidistant points `2πt/n` per feature
    /// (a tensor grid when there are several features).
    pub fn from_target(target: &TargetSeries, n_points: usize) -> Result<Self, TrainError> {
        let n = target.n_features();
        let total = n_points
            .checked_pow(n as u32)
            .ok_or_else(|| TrainError::InvalidDataset("grid too large".into()))?;
        let inputs: Vec<Vec<f64>> = (0..total)
            .map(|mut idx| {
                (0..n)
                    .map(|_| {
                        let t = idx % n_points;
                        idx /= n_points;
                        TAU * t as f64 / n_points as f64
                    })
                    .collect()
            })
            .collect();
        let labels = inputs.iter().map(|x| target.evaluate(x)).collect();
        Self::new(inputs, labels)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn inputs(&self) -> &[Vec<f64>] {
        &self.inputs
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GradientMethod {
    ParameterShift,
    CentralDifference,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub max_steps: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub restarts: usize,
    pub gradient: GradientMethod,
}

impl TrainConfig {
    /// Adam with learning rate 0.3, full batches of 25, 3 restarts.
    pub fn new(seed: u64, max_steps: usize) -> Self {
        Self {
            learning_rate: 0.3,
            max_steps,
            batch_size: DEFAULT_POINTS,
            seed,
            restarts: 3,
            gradient: GradientMethod::ParameterShift,
        }
    }

    fn validate(&self, data: &Dataset) -> Result<(), TrainError> {
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(TrainError::InvalidConfig(format!("learning rate {} must be positive", self.learning_rate)));
        }
        if self.max_steps == 0 || self.restarts == 0 || self.batch_size == 0 {
            return Err(TrainError::InvalidConfig("steps, restarts and batch size must be at least 1".into()));
        }
        if self.batch_size > data.len() {
            return Err(TrainError::InvalidConfig(format!(
                "batch size {} exceeds the {} data points",
                self.batch_size,
                data.len()
            )));
        }
        Ok(())
    }
}

/// Parameters, Adam moments and the loss history of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainState {
    pub params: Vec<f64>,
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub step: usize,
    /// `(step, full-data MSE at the parameters before that step's update)`.
    pub history: Vec<(usize, f64)>,
}

impl TrainState {
    pub fn new(params: Vec<f64>) -> Self {
        let n = params.len();
        Self { params, m: vec![0.0; n], v: vec![0.0; n], step: 0, history: Vec::new() }
    }

    pub fn final_loss(&self) -> Option<f64> {
        self.history.last().map(|&(_, l)| l)
    }
}

/// Summary of a [`fit`] call.
#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    /// MSE of the best run at its initial parameters.
    pub initial_loss: f64,
    pub final_losses: Vec<f64>,
    pub best_restart: usize,
}

impl FitReport {
    pub fn best_loss(&self) -> f64 {
        self.final_losses[self.best_restart]
    }
}

fn check_data(model: &CircuitModel, data: &Dataset) -> Result<(), TrainError> {
    if data.is_empty() {
        return Err(TrainError::EmptyDataset);
    }
    let n = data.inputs[0].len();
    if n != model.n_features() {
        return Err(SimError::FeatureCountMismatch { expected: model.n_features(), got: n }.into());
    }
    Ok(())
}

/// `(1/|D|) Σ (f(x_i) − y_i)²`.
pub fn mse_loss(model: &CircuitModel, params: &[f64], data: &Dataset) -> Result<f64, TrainError> {
    check_data(model, data)?;
    let residuals: Vec<f64> = data
        .inputs
        .par_iter()
        .zip(&data.labels)
        .map(|(x, y)| model.evaluate(params, x).map(|f| (f - y).powi(2)))
        .collect::<Result<_, _>>()?;
    Ok(residuals.iter().sum::<f64>() / data.len() as f64)
}

/// Gradient of the MSE over the whole dataset.
pub fn gradient(model: &CircuitModel, params: &[f64], data: &Dataset, method: GradientMethod) -> Result<Vec<f64>, TrainError> {
    check_data(model, data)?;
    let all: Vec<usize> = (0..data.len()).collect();
    batch_gradient(model, params, data, &all, method)
}

fn batch_gradient(
    model: &CircuitModel,
    params: &[f64],
    data: &Dataset,
    batch: &[usize],
    method: GradientMethod,
) -> Result<Vec<f64>, TrainError> {
    model.check_params(params)?;
    let n = params.len();
    let per_point: Vec<Vec<f64>> = match method {
        GradientMethod::ParameterShift => {
            let generators = model.param_generators();
            if generators.len() != n {
                return Err(TrainError::UnknownGeneratorType { param: generators.len() });
            }
            batch
                .par_iter()
                .map(|&i| {
                    let t = model.shifted_expectations(params, &data.inputs[i], FRAC_PI_2)?;
                    let r = t.base - data.labels[i];
                    Ok(t.plus.iter().zip(&t.minus).map(|(p, m)| r * (p - m)).collect())
                })
                .collect::<Result<_, SimError>>()?
        }
        GradientMethod::CentralDifference => batch
            .par_iter()
            .map(|&i| {
                let x = &data.inputs[i];
                let r = model.evaluate(params, x)? - data.labels[i];
                let mut shifted = params.to_vec();
                (0..n)
                    .map(|k| {
                        shifted[k] = params[k] + FD_STEP;
                        let fp = model.evaluate(&shifted, x)?;
                        shifted[k] = params[k] - FD_STEP;
                        let fm = model.evaluate(&shifted, x)?;
                        shifted[k] = params[k];
                        Ok(2.0 * r * (fp - fm) / (2.0 * FD_STEP))
                    })
                    .collect()
            })
            .collect::<Result<_, SimError>>()?,
    };
    // d/dθ (f − y)² = 2(f − y)·∂f, and ∂f = (f₊ − f₋)/2 for the shift rule
    let mut grad = vec![0.0; n];
    for g in &per_point {
        for (acc, v) in grad.iter_mut().zip(g) {
            *acc += v;
        }
    }
    let scale = 1.0 / batch.len() as f64;
    grad.iter_mut().for_each(|g| *g *= scale);
    Ok(grad)
}

/// One bias-corrected Adam update.
pub fn adam_step(mut state: TrainState, grad: &[f64], config: &TrainConfig) -> TrainState {
    state.step += 1;
    let t = state.step as i32;
    let c1 = 1.0 - ADAM_BETA1.powi(t);
    let c2 = 1.0 - ADAM_BETA2.powi(t);
    for (k, &g) in grad.iter().enumerate().take(state.params.len()) {
        state.m[k] = ADAM_BETA1 * state.m[k] + (1.0 - ADAM_BETA1) * g;
        state.v[k] = ADAM_BETA2 * state.v[k] + (1.0 - ADAM_BETA2) * g * g;
        let m_hat = state.m[k] / c1;
        let v_hat = state.v[k] / c2;
        state.params[k] -= config.learning_rate * m_hat / (v_hat.sqrt() + ADAM_EPS);
    }
    state
}

/// One training run from `params`.
pub fn train_run(
    model: &CircuitModel,
    params: Vec<f64>,
    data: &Dataset,
    config: &TrainConfig,
    rng: &mut ChaCha8Rng,
) -> Result<TrainState, TrainError> {
    config.validate(data)?;
    check_data(model, data)?;
    let full: Vec<usize> = (0..data.len()).collect();
    let mut state = TrainState::new(params);
    for step in 0..config.max_steps {
        let loss = mse_loss(model, &state.params, data)?;
        state.history.push((step, loss));
        let batch = if config.batch_size == data.len() {
            full.clone()
        } else {
            let mut b = index::sample(rng, data.len(), config.batch_size).into_vec();
            b.sort_unstable();
            b
        };
        let grad = batch_gradient(model, &state.params, data, &batch, config.gradient)?;
        state = adam_step(state, &grad, config);
    }
    let loss = mse_loss(model, &state.params, data)?;
    state.history.push((config.max_steps, loss));
    Ok(state)
}

/// Runs `config.restarts` independent runs (restart `i` seeded with
/// `seed + i`, parameters uniform in `[0, 2π)`) and keeps the one with the
/// lowest final MSE.
pub fn fit(model: &CircuitModel, data: &Dataset, config: &TrainConfig) -> Result<(TrainState, FitReport), TrainError> {
    config.validate(data)?;
    check_data(model, data)?;
    let mut best: Option<TrainState> = None;
    let mut final_losses = Vec::with_capacity(config.restarts);
    let mut best_restart = 0;
    for restart in 0..config.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(restart as u64));
        let params = crate::random::angles(&mut rng, model.param_count());
        let state = train_run(model, params, data, config, &mut rng)?;
        let loss = state.final_loss().expect("history is never empty");
        final_losses.push(loss);
        if best.as_ref().is_none_or(|b| loss < b.final_loss().unwrap()) {
            best_restart = restart;
            best = Some(state);
        }
    }
    let best = best.expect("at least one restart");
    let initial_loss = best.history[0].1;
    Ok((best, FitReport { initial_loss, final_losses, best_restart }))
}

/// Loss history as CSV with header `step,mse`.
pub fn loss_csv(history: &[(usize, f64)]) -> String {
    let mut out = String::from("step,mse\n");
    for (step, loss) in history {
        out.push_str(&format!("{step},{loss:.16e}\n"));
    }
    out
}

/// `Σ |c_n|²` over frequencies with some component above `model_degree`:
/// the lowest MSE a degree-`model_degree` model can reach on an equidistant
/// grid fine enough to resolve the target.
pub fn parseval_floor(target: &TargetSeries, model_degree: u32) -> f64 {
    target
        .frequencies()
        .iter()
        .filter(|n| n.iter().any(|v| v.unsigned_abs() > model_degree as u64))
        .map(|n| target.coefficient(n).expect("own frequency").norm_sqr())
        .sum()
}

/// Single-qubit model `W R_x(x) W` with general rotations `W`, measured in `σ_z`.
pub fn rot_rx_model(r: usize) -> CircuitModel {
    let rot = TrainableBlock::Ansatz(Ansatz::new(AnsatzKind::A, 1));
    CircuitModel::sequential_pauli(1, r, PauliAxis::X, rot, Observable::PauliZ { qubit: 0 }).expect("valid model")
}

/// `r` parallel `R_x` encodings between Circuit A blocks of three sublayers.
pub fn parallel_rx_model(r: usize) -> Result<CircuitModel, SimError> {
    let block = TrainableBlock::Ansatz(Ansatz::new(AnsatzKind::A, 3));
    CircuitModel::parallel_pauli(r, PauliAxis::X, block, Observable::PauliZ { qubit: 0 })
}

/// `c_0 = 0.1`, `c_n = 0.15 − 0.15i` for `n = 1..degree`.
pub fn offset_target(degree: u32) -> TargetSeries {
    let mut entries = vec![(vec![0], num_complex::Complex64::new(0.1, 0.0))];
    entries.extend((1..=degree as i64).map(|n| (vec![n], num_complex::Complex64::new(0.15, -0.15))));
    TargetSeries::new(1, degree, entries).expect("valid target")
}

/// `c_0 = 0`, `c_n = 0.05 − 0.05i` for `n = 1..5`.
pub fn flat_target() -> TargetSeries {
    let entries = (1..=5).map(|n| (vec![n], num_complex::Complex64::new(0.05, -0.05)));
    TargetSeries::new(1, 5, entries).expect("valid target")
}
