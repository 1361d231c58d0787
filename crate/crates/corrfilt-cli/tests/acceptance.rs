//! Acceptance gate for the benchmark contract. Each test covers one
//! criterion and prints a `[acceptance] criterion N (...): PASS` line;
//! together they pin down the unit-level oracles, the algebraic
//! reductions between the rules, the sampler's distribution, the
//! qualitative robustness orderings of the reference experiments at the
//! benchmark configuration, the variance estimator's end-to-end cost,
//! and byte-level reproducibility across worker counts.

use corrfilt::{
    algorithm_step, bcnlms_step, bcnmcc_step, empirical_cf, kernel_weight, nlms_step, nmcc_step,
    reduce_trials, run_scenario, run_trial, sample_alpha_stable, sample_gaussian,
    steady_state_msd, AlgorithmKind, AlphaStableParams, BiasInputs, CompensationMode,
    CompensationWeight, ExperimentSpec, FilterConfig, GaussianParams, OutputNoiseLaw, Regressor,
    RunMetadata, Scenario, ScenarioSchedule, SeededSource, Stage, SystemModel, TrialContext,
    VarEstState, VarianceMode, WeightVector, DEFAULT_VAREST_CLIP_PERCENTILE,
    DEFAULT_VAREST_FORGETTING, DEFAULT_VAREST_KAPPA,
};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::Command;

const SEED: u64 = 20180516;
const TAPS: usize = 5;

fn pass(number: u32, name: &str) {
    println!("[acceptance] criterion {number} ({name}): PASS");
}

fn plant() -> WeightVector {
    WeightVector::new(vec![-0.3, -0.9, 0.8, -0.7, 0.6]).unwrap()
}

/// The benchmark configuration: unit-power Gaussian input with mean 1,
/// input-noise variance 0.25, impulsive output disturbance.
fn benchmark_model() -> SystemModel {
    SystemModel::new(
        plant(),
        GaussianParams::new(1.0, 1.0).unwrap(),
        0.25,
        OutputNoiseLaw::AlphaStable(AlphaStableParams::new(1.3, 0.0, 0.2, 0.0).unwrap()),
    )
    .unwrap()
}

fn filter(step_size: f64) -> FilterConfig {
    FilterConfig::new(step_size, 4.0, 0.001, TAPS).unwrap()
}

fn benchmark_spec(algorithms: &[AlgorithmKind], trials: usize) -> ExperimentSpec {
    let mut filters = BTreeMap::new();
    for &algorithm in algorithms {
        filters.insert(algorithm, filter(corrfilt::default_step_size(algorithm)));
    }
    ExperimentSpec {
        model: benchmark_model(),
        algorithms: algorithms.to_vec(),
        filters,
        stage2_step_sizes: BTreeMap::new(),
        varest_forgetting: DEFAULT_VAREST_FORGETTING,
        varest_kappa: DEFAULT_VAREST_KAPPA,
        varest_clip_percentile: DEFAULT_VAREST_CLIP_PERCENTILE,
        trials,
        iterations_per_stage: 5000,
        master_seed: SEED,
        workers: 0,
        variance_mode: VarianceMode::Estimated,
        compensation: CompensationMode::Observed,
        config_hash: String::new(),
    }
}

fn steady_states(spec: &ExperimentSpec, scenario: Scenario) -> BTreeMap<AlgorithmKind, f64> {
    run_scenario(scenario, spec)
        .unwrap()
        .summary
        .into_iter()
        .map(|row| (row.algorithm, row.steady_state_db))
        .collect()
}

fn relative_close(actual: f64, expected: f64) -> bool {
    (actual - expected).abs() <= 1e-12 * expected.abs().max(1.0)
}

/// Criterion 1: single-step and single-formula oracles, each reproduced
/// here by direct formula evaluation and asserted to 1e-12 relative.
#[test]
fn criterion_1_unit_oracles() {
    let w = WeightVector::new(vec![0.2, -0.4, 0.6, 0.1, -0.3]).unwrap();
    let u = Regressor::new(vec![1.5, -0.7, 0.9, 1.1, -0.2]).unwrap();
    let d = 0.8;
    let cfg = filter(0.07);
    let variance = 0.25;

    // Direct evaluation of the shared building blocks.
    let prediction: f64 = w
        .as_slice()
        .iter()
        .zip(u.as_slice())
        .map(|(w, u)| w * u)
        .sum();
    let error = d - prediction;
    let energy: f64 = u.as_slice().iter().map(|x| x * x).sum();
    let denominator = energy + 0.001;
    let kernel = (-(error * error) / (2.0 * 4.0 * 4.0)).exp();
    assert!(relative_close(kernel_weight(error, 4.0), kernel));

    // Normalized correntropy step.
    let outcome = nmcc_step(&w, &u, d, &cfg).unwrap();
    for ((&wi, &ui), &got) in w
        .as_slice()
        .iter()
        .zip(u.as_slice())
        .zip(outcome.weights.as_slice())
    {
        let expected = wi + 0.07 * kernel * error * ui / denominator;
        assert!(relative_close(got, expected), "nmcc: {got} vs {expected}");
    }

    // Compensated steps: the same gradient plus the variance-scaled
    // pullback on the weights (kernel-free for the nlms variant).
    let outcome = bcnlms_step(&w, &u, d, variance, &cfg).unwrap();
    for ((&wi, &ui), &got) in w
        .as_slice()
        .iter()
        .zip(u.as_slice())
        .zip(outcome.weights.as_slice())
    {
        let expected =
            wi + 0.07 * error * ui / denominator + 0.07 * variance * wi / denominator;
        assert!(relative_close(got, expected), "bcnlms: {got} vs {expected}");
    }
    let outcome = bcnmcc_step(&w, &u, d, variance, &cfg).unwrap();
    for ((&wi, &ui), &got) in w
        .as_slice()
        .iter()
        .zip(u.as_slice())
        .zip(outcome.weights.as_slice())
    {
        let expected = wi
            + 0.07 * kernel * error * ui / denominator
            + 0.07 * kernel * variance * wi / denominator;
        assert!(relative_close(got, expected), "bcnmcc: {got} vs {expected}");
    }

    // Variance-estimator arithmetic: error power 1, per-tap weight power
    // 0.2, kappa 5, regressor energy 10 -> 1/6.5.
    let mut estimator = VarEstState::new(0.0, 5.0, TAPS).unwrap();
    estimator.update_error_power(1.0).unwrap();
    estimator
        .update_weight_power(&WeightVector::new(vec![1.0, 0.0, 0.0, 0.0, 0.0]).unwrap())
        .unwrap();
    let probe = Regressor::new(vec![10.0_f64.sqrt(), 0.0, 0.0, 0.0, 0.0]).unwrap();
    let estimate = estimator.estimate_input_variance(&probe, 0.001);
    assert!(!estimate.degenerate_input);
    assert!(relative_close(estimate.value, 1.0 / 6.5));

    // Ensemble arithmetic: deviations 0.5 and 1.5 average to 0 dB.
    let metadata = RunMetadata::new(SEED, "");
    let curve = reduce_trials(
        AlgorithmKind::Nmcc,
        &[vec![0.5], vec![1.5]],
        &metadata,
    )
    .unwrap();
    assert_eq!(curve.values_db[0], 0.0);

    // Noiseless identification: the normalized correntropy rule drives
    // the deviation below 1e-6 within 2000 iterations.
    let model = SystemModel::new(
        plant(),
        GaussianParams::new(1.0, 1.0).unwrap(),
        0.0,
        OutputNoiseLaw::Noiseless,
    )
    .unwrap();
    let schedule = ScenarioSchedule {
        stages: vec![Stage {
            iterations: 2000,
            output_noise: OutputNoiseLaw::Noiseless,
            step_sizes: BTreeMap::new(),
        }],
    };
    let ctx = TrialContext {
        master_seed: SEED,
        trial_index: 0,
        variance_mode: VarianceMode::Estimated,
        compensation: CompensationMode::Observed,
        varest_forgetting: DEFAULT_VAREST_FORGETTING,
        varest_kappa: DEFAULT_VAREST_KAPPA,
        varest_clip_percentile: DEFAULT_VAREST_CLIP_PERCENTILE,
    };
    let ratios = run_trial(&model, AlgorithmKind::Nmcc, &filter(0.5), &schedule, &ctx).unwrap();
    assert!(ratios[1999] < 1e-6, "final deviation {}", ratios[1999]);

    pass(1, "unit oracles");
}

/// Criterion 2: over 1e4 randomized states, zero input-noise variance
/// collapses each compensated rule to its plain counterpart, and a huge
/// kernel bandwidth collapses each correntropy rule to its kernel-free
/// counterpart (per-tap difference below 1e-12).
#[test]
fn criterion_2_reduction_equivalences() {
    let unit = GaussianParams::new(0.0, 1.0).unwrap();
    let mut source = SeededSource::new(0x5eed_2026, 0);
    let mut draw = |taps: usize| -> (WeightVector, Regressor, f64) {
        let w: Vec<f64> = (0..taps).map(|_| sample_gaussian(&mut source, &unit)).collect();
        let u: Vec<f64> = (0..taps).map(|_| sample_gaussian(&mut source, &unit)).collect();
        let d = sample_gaussian(&mut source, &unit);
        (WeightVector::new(w).unwrap(), Regressor::new(u).unwrap(), d)
    };

    let normal = filter(0.07);
    let huge = FilterConfig::new(0.07, 1e9, 0.001, TAPS).unwrap();
    let bias = BiasInputs {
        input_noise_variance: 0.25,
        compensation: CompensationWeight::Observed,
    };

    for _ in 0..10_000 {
        let (w, u, d) = draw(TAPS);

        // (a) Zero variance: compensation vanishes identically.
        let zero = BiasInputs {
            input_noise_variance: 0.0,
            compensation: CompensationWeight::Observed,
        };
        let bcnmcc =
            algorithm_step(AlgorithmKind::Bcnmcc, &w, &u, d, &normal, &zero).unwrap();
        let nmcc = nmcc_step(&w, &u, d, &normal).unwrap();
        assert_eq!(bcnmcc.weights.as_slice(), nmcc.weights.as_slice());
        let bcnlms =
            algorithm_step(AlgorithmKind::Bcnlms, &w, &u, d, &normal, &zero).unwrap();
        let nlms = nlms_step(&w, &u, d, &normal).unwrap();
        assert_eq!(bcnlms.weights.as_slice(), nlms.weights.as_slice());

        // (b) Huge bandwidth: the kernel factor degenerates to 1.
        let pairs: [(AlgorithmKind, AlgorithmKind); 3] = [
            (AlgorithmKind::Mcc, AlgorithmKind::Lms),
            (AlgorithmKind::Nmcc, AlgorithmKind::Nlms),
            (AlgorithmKind::Bcnmcc, AlgorithmKind::Bcnlms),
        ];
        for (kernelized, plain) in pairs {
            let a = algorithm_step(kernelized, &w, &u, d, &huge, &bias).unwrap();
            let b = algorithm_step(plain, &w, &u, d, &huge, &bias).unwrap();
            for (x, y) in a.weights.as_slice().iter().zip(b.weights.as_slice()) {
                assert!(
                    (x - y).abs() < 1e-12,
                    "{kernelized} vs {plain}: {x} vs {y}"
                );
            }
        }
    }
    pass(2, "reduction equivalences");
}

/// Criterion 3: the sampler's empirical characteristic function matches
/// the closed form within 0.02 uniformly on t in [0.1, 3.0] at N = 1e6
/// for four symmetric parameter sets, and the Gaussian corner has the
/// right variance to 3%.
#[test]
fn criterion_3_sampler_distribution() {
    let cases = [
        (2.0, 0.0, 1.0, 0.0),
        (1.0, 0.0, 1.0, 0.0),
        (1.3, 0.0, 0.2, 0.0),
        (1.8, 0.0, 0.2, 0.0),
    ];
    for (stream, &(alpha, beta, gamma, theta)) in cases.iter().enumerate() {
        let params = AlphaStableParams::new(alpha, beta, gamma, theta).unwrap();
        let mut source = SeededSource::new(0xcf_2026, stream as u64);
        let samples: Vec<f64> = (0..1_000_000)
            .map(|_| sample_alpha_stable(&mut source, &params))
            .collect();

        let mut worst = 0.0_f64;
        for i in 0..30 {
            let t = 0.1 + (3.0 - 0.1) * i as f64 / 29.0;
            let expected = (-gamma * t.powf(alpha)).exp();
            let z = empirical_cf(&samples, t).unwrap();
            let error = ((z.re - expected).powi(2) + z.im.powi(2)).sqrt();
            worst = worst.max(error);
        }
        assert!(
            worst < 0.02,
            "alpha={alpha}: sup CF error {worst} at N=1e6"
        );

        if alpha == 2.0 {
            let mean = samples.iter().sum::<f64>() / samples.len() as f64;
            let variance = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>()
                / samples.len() as f64;
            let expected = 2.0 * gamma;
            assert!(
                (variance - expected).abs() < 0.03 * expected,
                "gaussian corner variance {variance} vs {expected}"
            );
        }
    }
    pass(3, "sampler distribution");
}

/// Criterion 4: at the benchmark configuration (200 trials, two-stage
/// impulsiveness switch), the correntropy pair stays below -5 dB through
/// the final 500 iterations of the heavy stage, the kernel-free pair
/// blows past 0 dB, and compensation buys at least 1 dB of steady state
/// over plain MCC.
#[test]
fn criterion_4_robustness_split() {
    let algorithms = [
        AlgorithmKind::Lms,
        AlgorithmKind::Mcc,
        AlgorithmKind::Bcnlms,
        AlgorithmKind::Bcnmcc,
    ];
    let spec = benchmark_spec(&algorithms, 200);
    let result = run_scenario(Scenario::StageSwitch, &spec).unwrap();
    let set = &result.curve_sets[0];
    let stage2_start = set.stage_boundaries[0];

    let mut steady = BTreeMap::new();
    for curve in &set.curves {
        let len = curve.values_db.len();
        let last500 = curve.values_db[len - 500..]
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let stage2_peak = curve.values_db[stage2_start..]
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        match curve.algorithm {
            AlgorithmKind::Mcc | AlgorithmKind::Bcnmcc => assert!(
                last500 < -5.0,
                "{}: max over final 500 iterations {last500} dB",
                curve.algorithm
            ),
            AlgorithmKind::Lms | AlgorithmKind::Bcnlms => assert!(
                stage2_peak > 0.0,
                "{}: heavy-stage peak {stage2_peak} dB",
                curve.algorithm
            ),
            _ => {}
        }
        steady.insert(curve.algorithm, steady_state_msd(curve, 200).unwrap());
    }
    let mcc = steady[&AlgorithmKind::Mcc];
    let bcnmcc = steady[&AlgorithmKind::Bcnmcc];
    assert!(
        bcnmcc < mcc - 1.0,
        "steady state: bcnmcc {bcnmcc} dB vs mcc {mcc} dB"
    );
    println!("[acceptance]   steady state: mcc {mcc:.3} dB, bcnmcc {bcnmcc:.3} dB");
    pass(4, "robustness split");
}

fn sweep_orderings(scenario: Scenario, trials: usize) -> Vec<(f64, f64, f64)> {
    let spec = benchmark_spec(&[AlgorithmKind::Mcc, AlgorithmKind::Bcnmcc], trials);
    let result = run_scenario(scenario, &spec).unwrap();
    let mut by_point: BTreeMap<u64, (f64, Option<f64>, Option<f64>)> = BTreeMap::new();
    for row in result.summary {
        let value = row.sweep_value.expect("sweep rows carry their axis value");
        let entry = by_point
            .entry(value.to_bits())
            .or_insert((value, None, None));
        match row.algorithm {
            AlgorithmKind::Mcc => entry.1 = Some(row.steady_state_db),
            AlgorithmKind::Bcnmcc => entry.2 = Some(row.steady_state_db),
            other => panic!("unexpected algorithm {other} in sweep"),
        }
    }
    let mut points: Vec<(f64, f64, f64)> = by_point
        .values()
        .map(|(v, mcc, bcnmcc)| (*v, mcc.unwrap(), bcnmcc.unwrap()))
        .collect();
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    points
}

/// Criterion 5: compensation wins at every kernel bandwidth in the
/// sweep, at the full 200-trial ensemble and at a 50-trial smoke.
#[test]
fn criterion_5_bandwidth_sweep_ordering() {
    for trials in [200, 50] {
        let points = sweep_orderings(Scenario::SigmaSweep, trials);
        assert_eq!(points.len(), 5);
        for (sigma, mcc, bcnmcc) in &points {
            assert!(
                bcnmcc < mcc,
                "{trials} trials, sigma {sigma}: bcnmcc {bcnmcc} dB vs mcc {mcc} dB"
            );
        }
        println!(
            "[acceptance]   {trials}-trial bandwidth sweep: {}",
            points
                .iter()
                .map(|(s, m, b)| format!("sigma {s}: {b:.2} < {m:.2}"))
                .collect::<Vec<_>>()
                .join("; ")
        );
    }
    pass(5, "bandwidth sweep ordering");
}

/// Criterion 6: compensation wins at every input-noise variance in the
/// sweep, and its steady state degrades (weakly, within a 0.5 dB noise
/// allowance) as the variance grows.
#[test]
fn criterion_6_variance_sweep_ordering() {
    let points = sweep_orderings(Scenario::InputVarianceSweep, 200);
    assert_eq!(points.len(), 5);
    for (variance, mcc, bcnmcc) in &points {
        assert!(
            bcnmcc < mcc,
            "variance {variance}: bcnmcc {bcnmcc} dB vs mcc {mcc} dB"
        );
    }
    for pair in points.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        assert!(
            hi.2 >= lo.2 - 0.5,
            "steady state improved with more input noise: {} dB at {} vs {} dB at {}",
            hi.2,
            hi.0,
            lo.2,
            lo.0
        );
    }
    println!(
        "[acceptance]   variance sweep bcnmcc: {}",
        points
            .iter()
            .map(|(v, _, b)| format!("{v}: {b:.2} dB"))
            .collect::<Vec<_>>()
            .join("; ")
    );
    pass(6, "variance sweep ordering");
}

/// Criterion 7: with the variance estimated from data (the default), the
/// compensated rule still clears every criterion-4 bar, and switching
/// from the estimate to the true variance is reported and may not be
/// worth more than 3 dB — the estimator never costs more than that
/// against the genie reference.
///
/// The bound is one-sided by design. The estimator's clipped error power
/// falls as the weight power grows, so its compensation push dies off
/// during outward excursions; the genie reference pushes with constant
/// strength and therefore runs a few dB worse on heavy-tailed stages
/// (and at this ensemble's seed two of its 200 trials escape outright,
/// which only widens the reported gap). An estimator *worse* than the
/// genie by more than 3 dB would still fail here.
#[test]
fn criterion_7_estimator_sanity() {
    let algorithms = [AlgorithmKind::Mcc, AlgorithmKind::Bcnmcc];
    let estimated = steady_states(&benchmark_spec(&algorithms, 200), Scenario::StageSwitch);

    let mut oracle_spec = benchmark_spec(&[AlgorithmKind::Bcnmcc], 200);
    oracle_spec.variance_mode = VarianceMode::Oracle;
    let oracle = steady_states(&oracle_spec, Scenario::StageSwitch);

    let mcc = estimated[&AlgorithmKind::Mcc];
    let est = estimated[&AlgorithmKind::Bcnmcc];
    let orc = oracle[&AlgorithmKind::Bcnmcc];
    assert!(
        est < mcc - 1.0,
        "estimated-variance bcnmcc {est} dB vs mcc {mcc} dB"
    );
    let gap = est - orc;
    println!(
        "[acceptance]   bcnmcc steady state: estimated {est:.3} dB, oracle {orc:.3} dB, \
         estimator cost {gap:.3} dB"
    );
    assert!(gap < 3.0, "estimator costs {gap} dB against the known-variance reference");
    pass(7, "estimator sanity");
}

/// Criterion 8: two full runs of the shipped default config at worker
/// counts 1 and 8 emit byte-identical CSV files.
#[test]
fn criterion_8_reproducibility() {
    let config: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "configs", "paper_defaults.json"]
        .iter()
        .collect();
    assert!(config.exists(), "missing shipped config {}", config.display());
    let dir = tempfile::tempdir().unwrap();

    let mut outputs = Vec::new();
    for workers in ["1", "8"] {
        let out = dir.path().join(format!("workers-{workers}"));
        let status = Command::new(env!("CARGO_BIN_EXE_corrfilt"))
            .args(["run", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .args(["--workers", workers])
            .status()
            .unwrap();
        assert!(status.success(), "run with --workers {workers} failed");
        outputs.push(out);
    }
    for file in ["curves.csv", "summary.csv"] {
        let a = std::fs::read(outputs[0].join(file)).unwrap();
        let b = std::fs::read(outputs[1].join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between worker counts 1 and 8");
    }
    pass(8, "reproducibility");
}
