//! Diagnostic sweep of the variance-estimator forgetting factor.
//!
//! Bias compensation is only as good as the input-noise variance feeding
//! it: an output impulse inflates the error-power recursion, the estimate
//! saturates near ūᵀū/L, and until the recursion forgets the impulse the
//! compensation term pushes the weights outward harder than the gradient
//! pulls them in. This sweep measures how the ensemble MSD and the
//! estimate's excursion statistics depend on the forgetting factor, for
//! both compensated algorithms under the mild (alpha = 1.8) and heavy
//! (alpha = 1.3) output-noise laws.
//!
//! ```text
//! cargo run --release -p corrfilt --example estdiag
//! ```

use corrfilt::{
    algorithm_step, predict, ratio_to_db, reduce_trials, run_trial, steady_state_msd,
    AlgorithmKind, AlphaStableParams, BiasInputs, CompensationMode, CompensationWeight,
    FilterConfig, GaussianParams, OutputNoiseLaw, RunMetadata, SampleStream, ScenarioSchedule,
    Stage, SystemModel, TrialContext, VarEstState, VarianceMode, WeightVector,
};
use std::collections::BTreeMap;

const TRIALS: usize = 60;
const ITERS: usize = 5000;
const MASTER_SEED: u64 = 20180516;

fn model() -> SystemModel {
    SystemModel::new(
        WeightVector::new(vec![-0.3, -0.9, 0.8, -0.7, 0.6]).unwrap(),
        GaussianParams::new(1.0, 1.0).unwrap(),
        0.25,
        OutputNoiseLaw::AlphaStable(AlphaStableParams::new(1.3, 0.0, 0.2, 0.0).unwrap()),
    )
    .unwrap()
}

fn schedule(alpha: f64) -> ScenarioSchedule {
    ScenarioSchedule {
        stages: vec![Stage {
            iterations: ITERS,
            output_noise: OutputNoiseLaw::AlphaStable(
                AlphaStableParams::new(alpha, 0.0, 0.2, 0.0).unwrap(),
            ),
            step_sizes: BTreeMap::new(),
        }],
    }
}

/// Ensemble steady state, late-run peak, and diverged-trial count at one
/// forgetting factor.
fn ensemble_stats(
    algorithm: AlgorithmKind,
    mu: f64,
    alpha: f64,
    forgetting: f64,
) -> (f64, f64, usize) {
    let model = model();
    let cfg = FilterConfig::new(mu, 4.0, 0.001, 5).unwrap();
    let schedule = schedule(alpha);
    let ratios: Vec<Vec<f64>> = (0..TRIALS as u64)
        .map(|trial_index| {
            let ctx = TrialContext {
                master_seed: MASTER_SEED,
                trial_index,
                variance_mode: VarianceMode::Estimated,
                compensation: CompensationMode::Observed,
                varest_forgetting: forgetting,
                varest_kappa: 5.0,
                varest_clip_percentile: None,
            };
            run_trial(&model, algorithm, &cfg, &schedule, &ctx).unwrap()
        })
        .collect();
    let curve = reduce_trials(algorithm, &ratios, &RunMetadata::new(MASTER_SEED, "")).unwrap();
    let ss = steady_state_msd(&curve, 200).unwrap();
    let peak = curve.values_db[ITERS - 1000..]
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let diverged = ratios.iter().filter(|r| r[ITERS - 1] > 1.0).count();
    (ss, peak, diverged)
}

/// Single-trial trace of the variance estimate: mean/max over the last
/// 2000 iterations plus the fraction of iterations estimating above 1.0
/// (four times the true 0.25).
fn estimate_trace(algorithm: AlgorithmKind, mu: f64, alpha: f64, forgetting: f64) -> (f64, f64, f64) {
    let model = model();
    let cfg = FilterConfig::new(mu, 4.0, 0.001, 5).unwrap();
    let mut stream = SampleStream::new(&model, MASTER_SEED, 7);
    let mut estimator = VarEstState::new(forgetting, 5.0, 5).unwrap();
    let mut weights = WeightVector::zeros(5);
    let law = OutputNoiseLaw::AlphaStable(AlphaStableParams::new(alpha, 0.0, 0.2, 0.0).unwrap());
    let mut estimates = Vec::with_capacity(ITERS);
    for _ in 0..ITERS {
        let sample = stream.next_sample(&law).unwrap();
        let error = sample.desired - predict(&weights, &sample.noisy);
        estimator.update_error_power(error).unwrap();
        estimator.update_weight_power(&weights).unwrap();
        let estimate = estimator
            .estimate_input_variance(&sample.noisy, cfg.regularization())
            .value;
        estimates.push(estimate);
        let bias = BiasInputs {
            input_noise_variance: estimate,
            compensation: CompensationWeight::Observed,
        };
        weights = algorithm_step(algorithm, &weights, &sample.noisy, sample.desired, &cfg, &bias)
            .unwrap()
            .weights;
    }
    let tail = &estimates[ITERS - 2000..];
    let mean = tail.iter().sum::<f64>() / tail.len() as f64;
    let max = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let frac_high = tail.iter().filter(|&&v| v > 1.0).count() as f64 / tail.len() as f64;
    (mean, max, frac_high)
}

fn main() {
    let mus = [
        (AlgorithmKind::Bcnlms, 0.060340),
        (AlgorithmKind::Bcnmcc, 0.067427),
    ];
    println!(
        "{:8} {:>6} {:>7} {:>10} {:>10} {:>9} {:>10} {:>9} {:>10}",
        "algo", "alpha", "a", "ss dB", "peak dB", "diverged", "est mean", "est max", "frac>1.0"
    );
    for (algorithm, mu) in mus {
        for alpha in [1.8, 1.3] {
            for forgetting in [0.75, 0.80, 0.85, 0.90, 0.95] {
                let (ss, peak, diverged) = ensemble_stats(algorithm, mu, alpha, forgetting);
                let (mean, max, frac) = estimate_trace(algorithm, mu, alpha, forgetting);
                println!(
                    "{:8} {:>6} {:>7} {:>10.3} {:>10.3} {:>6}/{} {:>10.4} {:>9.3} {:>10.4}",
                    algorithm.name(),
                    alpha,
                    forgetting,
                    ss,
                    peak,
                    diverged,
                    TRIALS,
                    mean,
                    max,
                    frac
                );
            }
            println!();
        }
    }
    let _ = ratio_to_db(1.0);
}
