//! Throughput of the six weight-update rules on a realistic adaptation
//! loop: five taps, noisy regressors, impulsive desired signal, weights
//! carried forward step to step. Inputs are pre-generated so the numbers
//! measure the update arithmetic, not the random-number generator.

use corrfilt::{
    algorithm_step, AlgorithmKind, AlphaStableParams, BiasInputs, CompensationWeight,
    FilterConfig, GaussianParams, Regressor, SeededSource, WeightVector,
};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

const TAPS: usize = 5;
const STEPS: usize = 512;
const TRUE_WEIGHTS: [f64; TAPS] = [-0.3, -0.9, 0.8, -0.7, 0.6];

struct Sample {
    regressor: Regressor,
    desired: f64,
}

/// Pre-generate an errors-in-variables sample path: clean tapped-delay
/// input drives the plant, the filter sees the noisy regressor and an
/// impulsive-noise-corrupted output.
fn sample_path() -> Vec<Sample> {
    let mut src = SeededSource::new(20180516, 0);
    let input = GaussianParams::new(0.0, 1.0).unwrap();
    let input_noise = GaussianParams::new(0.0, 0.25).unwrap();
    let output_noise = AlphaStableParams::new(1.8, 0.0, 0.2, 0.0).unwrap();

    let mut clean = vec![0.0_f64; TAPS];
    let mut path = Vec::with_capacity(STEPS);
    for _ in 0..STEPS {
        clean.rotate_right(1);
        clean[0] = corrfilt::sample_gaussian(&mut src, &input);
        let desired: f64 = clean
            .iter()
            .zip(TRUE_WEIGHTS)
            .map(|(u, w)| u * w)
            .sum::<f64>()
            + corrfilt::sample_alpha_stable(&mut src, &output_noise);
        let noisy: Vec<f64> = clean
            .iter()
            .map(|u| u + corrfilt::sample_gaussian(&mut src, &input_noise))
            .collect();
        path.push(Sample {
            regressor: Regressor::new(noisy).unwrap(),
            desired,
        });
    }
    path
}

fn bench_step_rules(c: &mut Criterion) {
    let path = sample_path();
    let cfg = FilterConfig::new(0.05, 4.0, 0.001, TAPS).unwrap();
    let bias = BiasInputs {
        input_noise_variance: 0.25,
        compensation: CompensationWeight::Observed,
    };

    let mut group = c.benchmark_group("step_rules");
    group.throughput(Throughput::Elements(STEPS as u64));
    for kind in AlgorithmKind::ALL {
        group.bench_with_input(BenchmarkId::from_parameter(kind.name()), &kind, |b, &k| {
            b.iter(|| {
                let mut weights = WeightVector::zeros(TAPS);
                for sample in &path {
                    let out =
                        algorithm_step(k, &weights, &sample.regressor, sample.desired, &cfg, &bias)
                            .unwrap();
                    weights = out.weights;
                }
                weights
            });
        });
    }
    group.finish();
}

criterion_group!(benches, bench_step_rules);
criterion_main!(benches);
