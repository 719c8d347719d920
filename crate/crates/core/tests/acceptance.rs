//! Acceptance criteria, run sequentially with one PASS/FAIL line each.
//! Built without the libtest harness so the report is always printed.

use std::f64::consts::{PI, TAU};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fourier_qml::fourier::{
    coefficients_dft, coefficients_exact, coefficients_multivariate, dft_spectrum, eval_series, FourierCoefficients,
};
use fourier_qml::linalg::ComplexMatrix;
use fourier_qml::random;
use fourier_qml::sampling::{coefficient_stats, sample_coefficients, samples_csv, stats_csv};
use fourier_qml::simulator::{
    Ansatz, AnsatzKind, CircuitModel, DiagonalBlock, EncodingSpec, GeneratorEncoding, Layer, Observable, PauliAxis,
    TrainableBlock,
};
use fourier_qml::spectra::{
    frequency_spectrum, parallel_pauli_spectrum, rescale_to_integer, sequential_pauli_spectrum, spectrum_size_bound,
    EncodingHamiltonian, FrequencySpectrum, SpectrumError,
};
use fourier_qml::training::{
    fit, flat_target, gradient, offset_target, parallel_rx_model, parseval_floor, rot_rx_model, Dataset, GradientMethod,
    TrainConfig,
};
use fourier_qml::universal::{build_universal_model, verify_universal, TargetSeries};

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("spectrum identities", Duration::from_secs(1), spectrum_identities),
        ("spectrum size bound", Duration::from_secs(5), size_bound),
        ("coefficient oracle equivalence", Duration::from_secs(30), oracle_equivalence),
        ("single-qubit fitting", Duration::from_secs(120), single_qubit_fitting),
        ("degree-5 fitting", Duration::from_secs(600), degree5_fitting),
        ("universal round trip", Duration::from_secs(30), universal_round_trip),
        ("gradient check", Duration::from_secs(30), gradient_check),
        ("coefficient sampling", Duration::from_secs(120), coefficient_sampling),
        ("integer rescaling", Duration::from_secs(1), rescaling),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| check(false, "panicked"));
        let elapsed = start.elapsed();
        let in_time = elapsed <= *budget;
        let pass = outcome.pass && in_time;
        if !pass {
            failed += 1;
        }
        println!(
            "{} {} {name}: {} [{:.2} s of {} s]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            outcome.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn ints(spec: &FrequencySpectrum) -> Vec<i64> {
    spec.integers().unwrap_or_default()
}

fn spectrum_identities() -> Outcome {
    for r in 1..=8usize {
        let want: Vec<i64> = (-(r as i64)..=r as i64).collect();
        let par = parallel_pauli_spectrum(r).unwrap();
        let seq = sequential_pauli_spectrum(r).unwrap();
        if ints(&par) != want || ints(&seq) != want || par != seq {
            return check(false, format!("r = {r}: parallel {par}, sequential {seq}"));
        }
    }
    let two = frequency_spectrum(&EncodingHamiltonian::new(vec![-1.0, 1.0]).unwrap(), 1).unwrap();
    check(ints(&two) == vec![-2, 0, 2], format!("r = 1..8 give {{-r..r}} both ways; {{-1, 1}} gives {two}"))
}

fn size_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut tight = 0;
    for i in 0..200 {
        let d = rng.gen_range(1..=4usize);
        let layers = rng.gen_range(1..=3u32);
        let eig: Vec<f64> = if i % 2 == 0 {
            (0..d).map(|_| rng.gen_range(-3.0..3.0)).collect()
        } else {
            (0..d).map(|_| rng.gen_range(-3..=3) as f64).collect()
        };
        let k = frequency_spectrum(&EncodingHamiltonian::new(eig.clone()).unwrap(), layers as usize).unwrap().size() as u64;
        let bound = spectrum_size_bound(d as u64, layers).unwrap();
        if k > bound {
            return check(false, format!("eigenvalues {eig:?}, L = {layers}: K = {k} > {bound}"));
        }
        if k == bound {
            tight += 1;
        }
    }
    check(true, format!("200 draws within bound, {tight} tight"))
}

/// Path expansion runs over the whole register, so draws keep
/// `(2^n)^{2L} ≤ 10^6`.
fn random_model(rng: &mut ChaCha8Rng) -> CircuitModel {
    let n = rng.gen_range(1..=6usize);
    let max_layers = match n {
        1..=3 => 3,
        4 => 2,
        _ => 1,
    };
    let n_layers = rng.gen_range(1..=max_layers);
    let dim = 1usize << n;
    let block = |rng: &mut ChaCha8Rng| {
        if rng.gen_bool(0.4) {
            TrainableBlock::Fixed(random::unitary(rng, dim))
        } else {
            let kind = if rng.gen_bool(0.5) { AnsatzKind::A } else { AnsatzKind::B };
            TrainableBlock::Ansatz(Ansatz::new(kind, rng.gen_range(1..=2)))
        }
    };
    let two_qubits = |rng: &mut ChaCha8Rng| {
        let a = rng.gen_range(0..n);
        let b = (a + rng.gen_range(1..n)) % n;
        vec![a, b]
    };
    let layers = (0..n_layers)
        .map(|_| {
            let axis = [PauliAxis::X, PauliAxis::Y, PauliAxis::Z][rng.gen_range(0..3)];
            let encoding = match rng.gen_range(0..4) {
                0 => EncodingSpec::PauliRotation { axis, qubit: rng.gen_range(0..n), feature: 0 },
                1 if n >= 2 => EncodingSpec::ParallelPauli { axis, qubits: two_qubits(rng), features: vec![0, 0] },
                2 if n >= 2 => {
                    let eig = (0..4).map(|_| rng.gen_range(-2..=2) as f64).collect();
                    EncodingSpec::Diagonal {
                        blocks: vec![DiagonalBlock {
                            qubits: two_qubits(rng),
                            feature: 0,
                            hamiltonian: EncodingHamiltonian::new(eig).unwrap(),
                        }],
                    }
                }
                _ => {
                    // a non-diagonal generator with integer spectrum
                    let u = random::unitary(rng, 2);
                    let d = ComplexMatrix::diagonal(&[
                        Complex64::new(rng.gen_range(-2..=2) as f64, 0.0),
                        Complex64::new(rng.gen_range(-2..=2) as f64, 0.0),
                    ]);
                    let h = &(&u * &d) * &u.adjoint();
                    EncodingSpec::Generator(GeneratorEncoding::new(vec![rng.gen_range(0..n)], 0, h).unwrap())
                }
            };
            Layer { trainable: block(rng), encoding }
        })
        .collect();
    let observable = if rng.gen_bool(0.5) {
        Observable::PauliZ { qubit: rng.gen_range(0..n) }
    } else {
        Observable::Dense(random::hermitian(rng, dim))
    };
    let last = block(rng);
    CircuitModel::new(n, 1, 1.0, layers, last, observable).unwrap()
}

fn max_gap(a: &FourierCoefficients, b: &FourierCoefficients) -> f64 {
    a.iter()
        .map(|(w, c)| (c - b.get(w)).norm())
        .chain(b.iter().map(|(w, c)| (c - a.get(w)).norm()))
        .fold(0.0, f64::max)
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut worst_dft, mut worst_multi, mut worst_eval) = (0.0f64, 0.0f64, 0.0f64);
    let mut single_layer = 0;
    for _ in 0..50 {
        let model = random_model(&mut rng);
        let theta = random::angles(&mut rng, model.param_count());
        let exact = coefficients_exact(&model, &theta).unwrap();
        let dft = coefficients_dft(&model, &theta, &dft_spectrum(&model).unwrap()).unwrap();
        worst_dft = worst_dft.max(max_gap(&exact, &dft));

        if model.layers().len() == 1 {
            // f = ⟨Γ|S†(x) M S(x)|Γ⟩ in the encoding eigenbasis
            single_layer += 1;
            let diag = model.diagonalized(&theta).unwrap();
            let first = &diag.blocks[0];
            let gamma: Vec<Complex64> = (0..diag.dim()).map(|i| first[(i, 0)]).collect();
            let last = &diag.blocks[1];
            let m = &(&last.adjoint() * &diag.observable) * last;
            let eig: Vec<f64> = diag.layer_eigenvalues[0].iter().map(|l| l[0]).collect();
            let multi = coefficients_multivariate(&gamma, &m, &[EncodingHamiltonian::new(eig).unwrap()]).unwrap();
            worst_multi = worst_multi.max(max_gap(&exact, &multi));
        }

        for _ in 0..100 {
            let x = [rng.gen_range(0.0..TAU)];
            let f = model.evaluate(&theta, &x).unwrap();
            worst_eval = worst_eval.max((f - eval_series(&exact, &x).unwrap()).abs());
        }
    }
    check(
        worst_dft <= 1e-8 && worst_multi <= 1e-8 && worst_eval <= 1e-8,
        format!(
            "exact vs sampled {worst_dft:.1e}, exact vs single-layer formula {worst_multi:.1e} \
             ({single_layer} models), reconstruction {worst_eval:.1e}; tolerance 1e-8"
        ),
    )
}

fn fit_loss(model: &CircuitModel, target: &TargetSeries, seed: u64, steps: usize) -> f64 {
    let data = Dataset::from_target(target, 25).unwrap();
    let config = TrainConfig::new(seed, steps);
    let (_, report) = fit(model, &data, &config).unwrap();
    report.best_loss()
}

fn single_qubit_fitting() -> Outcome {
    let model = rot_rx_model(1);
    let fits = fit_loss(&model, &offset_target(1), 21, 200);
    let stretched = fit_loss(&model.with_input_scale(2.0).unwrap(), &offset_target(1), 21, 200);
    let too_high = fit_loss(&model, &offset_target(2), 21, 200);
    check(
        fits <= 1e-3 && stretched >= 1e-2 && too_high >= 0.08,
        format!(
            "degree 1: {fits:.2e} (≤ 1e-3); inputs x→2x: {stretched:.3} (≥ 1e-2); degree 2: {too_high:.4} (≥ 0.08, floor {:.2})",
            parseval_floor(&offset_target(2), 1)
        ),
    )
}

fn degree5_fitting() -> Outcome {
    let target = flat_target();
    let mut ok = true;
    let mut parts = Vec::new();
    for (label, build) in [
        ("sequential", (|r| rot_rx_model(r)) as fn(usize) -> CircuitModel),
        ("parallel", |r| parallel_rx_model(r).unwrap()),
    ] {
        let losses: Vec<f64> = [1, 3, 5].iter().map(|&r| fit_loss(&build(r), &target, 5, 1000)).collect();
        let floors = [parseval_floor(&target, 1), parseval_floor(&target, 3)];
        ok &= losses[0] > losses[1] && losses[1] > losses[2];
        ok &= losses[2] <= 1e-3;
        ok &= losses[0] >= 0.9 * floors[0] && losses[1] >= 0.9 * floors[1];
        parts.push(format!("{label} r=1,3,5: {:.4}, {:.4}, {:.1e}", losses[0], losses[1], losses[2]));
    }
    check(ok, format!("{} (floors 0.04, 0.02; r=5 ≤ 1e-3)", parts.join("; ")))
}

fn universal_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut worst, mut worst_herm) = (0.0f64, 0.0f64);
    for i in 0..50 {
        let n = 1 + i % 2;
        let k = rng.gen_range(0..=3);
        let target = TargetSeries::random(&mut rng, n, k, 0.3).unwrap();
        let built = build_universal_model(&target).unwrap();
        worst = worst.max(verify_universal(&built, &target, 100, i as u64).unwrap());
        worst_herm = worst_herm.max(built.observable.hermitian_deviation());
    }
    check(
        worst <= 1e-8 && worst_herm <= 1e-12,
        format!("max pointwise error {worst:.1e} (≤ 1e-8), observable Hermiticity {worst_herm:.1e} (≤ 1e-12)"),
    )
}

fn gradient_check() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let n = rng.gen_range(1..=3);
        let layers = rng.gen_range(1..=3);
        let kind = if rng.gen_bool(0.5) { AnsatzKind::A } else { AnsatzKind::B };
        let block = TrainableBlock::Ansatz(Ansatz::new(kind, rng.gen_range(1..=2)));
        let axis = [PauliAxis::X, PauliAxis::Y, PauliAxis::Z][rng.gen_range(0..3)];
        let observable = if rng.gen_bool(0.5) {
            Observable::PauliZ { qubit: 0 }
        } else {
            Observable::Dense(random::hermitian(&mut rng, 1 << n))
        };
        let model = CircuitModel::sequential_pauli(n, layers, axis, block, observable).unwrap();
        let target = TargetSeries::random(&mut rng, 1, 2, 0.2).unwrap();
        let data = Dataset::from_target(&target, 7).unwrap();
        let theta = random::angles(&mut rng, model.param_count());
        let shift = gradient(&model, &theta, &data, GradientMethod::ParameterShift).unwrap();
        let fd = gradient(&model, &theta, &data, GradientMethod::CentralDifference).unwrap();
        worst = shift.iter().zip(&fd).map(|(a, b)| (a - b).abs()).fold(worst, f64::max);
    }
    check(worst <= 1e-5, format!("max |shift − central difference| {worst:.1e} (≤ 1e-5)"))
}

fn coefficient_sampling() -> Outcome {
    let out_dir = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("coefficient-samples");
    std::fs::create_dir_all(&out_dir).unwrap();
    let mut ok = true;
    let mut tables = Vec::new();
    for n_qubits in [3usize, 5] {
        for kind in [AnsatzKind::A, AnsatzKind::B] {
            for sublayers in [1, 3, 5] {
                let ansatz = Ansatz::new(kind, sublayers);
                let samples = sample_coefficients(ansatz, n_qubits, 100, 8, 5).unwrap();
                for s in &samples {
                    ok &= s.coefficients.symmetry_deviation().0 <= 1e-10;
                    ok &= s.coefficients.coefficient(0.0).im.abs() <= 1e-10;
                    ok &= s.coefficients.iter().all(|(w, c)| w[0].abs() <= n_qubits as f64 || c.norm() <= 1e-10);
                }
                let csv = samples_csv(&samples, 5);
                let again = samples_csv(&sample_coefficients(ansatz, n_qubits, 100, 8, 5).unwrap(), 5);
                ok &= csv == again;
                let stats = coefficient_stats(&samples, 5).unwrap();
                let name = format!("{kind:?}-l{sublayers}-r{n_qubits}");
                std::fs::write(out_dir.join(format!("{name}.csv")), &csv).unwrap();
                std::fs::write(out_dir.join(format!("{name}-stats.csv")), stats_csv(&stats)).unwrap();
                let var: Vec<String> = stats.iter().map(|s| format!("{:.1e}", s.var_re + s.var_im)).collect();
                tables.push(format!("  circuit {kind:?}, l = {sublayers}, r = {n_qubits}: variance c0..c5 = [{}]", var.join(", ")));
            }
        }
    }
    for t in &tables {
        println!("{t}");
    }
    check(ok, format!("12 clouds of 100 samples symmetric, supported and reproducible; CSV in {}", out_dir.display()))
}

fn rescaling() -> Outcome {
    let spec = FrequencySpectrum::from_differences([-1.5, -0.5, 0.0, 0.5, 1.5]);
    let (base, ints) = rescale_to_integer(&spec).unwrap();
    let good = base == 0.5 && ints.integers() == Some(vec![-3, -1, 0, 1, 3]);
    let bad = rescale_to_integer(&FrequencySpectrum::from_differences([-PI, 0.0, 1.0]));
    check(
        good && matches!(bad, Err(SpectrumError::Incommensurable { .. })),
        format!("ω₀ = {base}, Ω = {ints}; {{-π, 0, 1}} → {}", bad.map_or_else(|e| e.to_string(), |_| "accepted".into())),
    )
}
