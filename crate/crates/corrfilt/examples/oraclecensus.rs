//! Escape census for the oracle-variance reference mode: across master
//! seeds and step-size factors, how many 200-trial ensemble members end
//! the heavy impulsive stage elevated, and what that does to the
//! ensemble-mean steady state. Companion to `modediag`; the numbers feed
//! the analysis of when the constant-variance reference is trustworthy.
//!
//! Run with `cargo run --release -p corrfilt --example oraclecensus`.

use corrfilt::{
    run_trial, AlgorithmKind, AlphaStableParams, CompensationMode, FilterConfig, GaussianParams,
    OutputNoiseLaw, ScenarioSchedule, Stage, SystemModel, TrialContext, VarianceMode,
    WeightVector,
};
use std::collections::BTreeMap;

const TRIALS: u64 = 200;
const STAGE_ITERS: usize = 5000;
const MU: f64 = 0.071015;

fn model() -> SystemModel {
    SystemModel::new(
        WeightVector::new(vec![-0.3, -0.9, 0.8, -0.7, 0.6]).unwrap(),
        GaussianParams::new(1.0, 1.0).unwrap(),
        0.25,
        OutputNoiseLaw::AlphaStable(AlphaStableParams::new(1.3, 0.0, 0.2, 0.0).unwrap()),
    )
    .unwrap()
}

fn two_stage() -> ScenarioSchedule {
    let stage = |alpha: f64| Stage {
        iterations: STAGE_ITERS,
        output_noise: OutputNoiseLaw::AlphaStable(
            AlphaStableParams::new(alpha, 0.0, 0.2, 0.0).unwrap(),
        ),
        step_sizes: BTreeMap::new(),
    };
    ScenarioSchedule {
        stages: vec![stage(1.8), stage(1.3)],
    }
}

fn main() {
    let model = model();
    let schedule = two_stage();
    println!("oracle-variance bcnmcc, 200 trials each, tail = mean ratio over last 200 iters");
    println!("escaped = tail above 0 dB; elevated = tail above -10 dB\n");
    for seed in [20180516u64, 7777, 424242, 1234567] {
        for factor in [1.0, 0.7, 0.5] {
            let cfg = FilterConfig::new(MU * factor, 4.0, 0.001, 5).unwrap();
            let mut tails = Vec::new();
            for trial_index in 0..TRIALS {
                let ctx = TrialContext {
                    master_seed: seed,
                    trial_index,
                    variance_mode: VarianceMode::Oracle,
                    compensation: CompensationMode::Observed,
                    varest_forgetting: corrfilt::DEFAULT_VAREST_FORGETTING,
                    varest_kappa: 5.0,
                    varest_clip_percentile: corrfilt::DEFAULT_VAREST_CLIP_PERCENTILE,
                };
                let ratios =
                    run_trial(&model, AlgorithmKind::Bcnmcc, &cfg, &schedule, &ctx).unwrap();
                let n = ratios.len();
                tails.push(ratios[n - 200..].iter().sum::<f64>() / 200.0);
            }
            let mean = tails.iter().sum::<f64>() / TRIALS as f64;
            let escaped = tails.iter().filter(|r| **r > 1.0).count();
            let elevated = tails.iter().filter(|r| **r > 0.1).count();
            let worst = tails.iter().cloned().fold(f64::MIN, f64::max);
            println!(
                "seed {seed:>8} mu*{factor:.1}: ss {:7.3} dB, worst {:7.3} dB, escaped {escaped}, elevated {elevated}",
                10.0 * mean.log10(),
                10.0 * worst.log10(),
            );
        }
        println!();
    }
}
