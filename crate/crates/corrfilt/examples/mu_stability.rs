//! Step-size stability probe for the compensated correntropy rule.
//!
//! The estimated input-noise variance overshoots after an output impulse;
//! the compensation term then pushes the weights outward until the
//! estimate relaxes. Whether a trial escapes to the kernel's dead zone
//! (where exp(-e'²/2σ²) gates every update to zero) depends strongly on
//! the step size. This probe maps, per step size: the early-convergence
//! speed under the mild law, the steady state of a full two-stage run,
//! and the fraction of trials left in a diverged state.
//!
//! ```text
//! cargo run --release -p corrfilt --example mu_stability
//! ```

use corrfilt::{
    ratio_to_db, reduce_trials, run_trial, steady_state_msd, AlgorithmKind, AlphaStableParams,
    CompensationMode, FilterConfig, GaussianParams, OutputNoiseLaw, RunMetadata,
    ScenarioSchedule, Stage, SystemModel, TrialContext, VarianceMode, WeightVector,
};
use std::collections::BTreeMap;

const TRIALS: usize = 100;
const STAGE_ITERS: usize = 5000;
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

fn stage(alpha: f64, iterations: usize) -> Stage {
    Stage {
        iterations,
        output_noise: OutputNoiseLaw::AlphaStable(
            AlphaStableParams::new(alpha, 0.0, 0.2, 0.0).unwrap(),
        ),
        step_sizes: BTreeMap::new(),
    }
}

fn trial_ratios(algorithm: AlgorithmKind, mu: f64, schedule: &ScenarioSchedule) -> Vec<Vec<f64>> {
    let model = model();
    let cfg = FilterConfig::new(mu, 4.0, 0.001, 5).unwrap();
    (0..TRIALS as u64)
        .map(|trial_index| {
            let ctx = TrialContext {
                master_seed: MASTER_SEED,
                trial_index,
                variance_mode: VarianceMode::Estimated,
                compensation: CompensationMode::Observed,
                varest_forgetting: corrfilt::DEFAULT_VAREST_FORGETTING,
                varest_kappa: 5.0,
                varest_clip_percentile: corrfilt::DEFAULT_VAREST_CLIP_PERCENTILE,
            };
            run_trial(&model, algorithm, &cfg, schedule, &ctx).unwrap()
        })
        .collect()
}

fn main() {
    let probe = ScenarioSchedule {
        stages: vec![stage(1.8, 201)],
    };
    let two_stage = ScenarioSchedule {
        stages: vec![stage(1.8, STAGE_ITERS), stage(1.3, STAGE_ITERS)],
    };
    println!(
        "{:>9} {:>14} {:>12} {:>12} {:>12} {:>10}",
        "mu", "median@200 dB", "mean@200 dB", "ss dB", "max last500", "diverged"
    );
    for mu in [0.005, 0.01, 0.02, 0.03, 0.045, 0.0674] {
        let mut finals: Vec<f64> = trial_ratios(AlgorithmKind::Bcnmcc, mu, &probe)
            .iter()
            .map(|r| r[200])
            .collect();
        finals.sort_by(|a, b| a.total_cmp(b));
        let median = ratio_to_db(0.5 * (finals[TRIALS / 2 - 1] + finals[TRIALS / 2]));
        let mean = ratio_to_db(finals.iter().sum::<f64>() / TRIALS as f64);

        let ratios = trial_ratios(AlgorithmKind::Bcnmcc, mu, &two_stage);
        let curve = reduce_trials(
            AlgorithmKind::Bcnmcc,
            &ratios,
            &RunMetadata::new(MASTER_SEED, ""),
        )
        .unwrap();
        let ss = steady_state_msd(&curve, 200).unwrap();
        let n = curve.values_db.len();
        let max_last500 = curve.values_db[n - 500..]
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        // A trial counts as diverged when its final deviation exceeds the
        // initial one (ratio > 1, i.e. worse than the zero vector).
        let diverged = ratios.iter().filter(|r| r[n - 1] > 1.0).count();
        println!(
            "{:>9.4} {:>14.3} {:>12.3} {:>12.3} {:>12.3} {:>7}/{}",
            mu, median, mean, ss, max_last500, diverged, TRIALS
        );
    }
}
