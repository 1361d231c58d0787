//! Adaptive filtering for system identification when both the input and the
//! output of the unknown system are observed through noise.
//!
//! The crate provides:
//!
//! - [`noisegen`]: seeded, reproducible noise sources — Gaussian and
//!   alpha-stable (impulsive) — plus an empirical characteristic function
//!   for distribution-level validation.
//! - [`filters`]: six stochastic-gradient update rules behind one stepper
//!   interface: LMS, NLMS, MCC, NMCC, and their bias-compensated variants
//!   BCNLMS and BCNMCC. The bias-compensated rules counteract the shrinkage
//!   bias that input noise induces in the weight estimate.
//! - [`varest`]: recursive estimation of the input-noise variance from
//!   observable quantities, used by the bias-compensated rules when the true
//!   variance is unknown.
//! - [`harness`]: Monte-Carlo experiment driver — synthetic plant, mean
//!   square deviation curves, trial ensembles, and the built-in benchmark
//!   scenarios.
//!
//! All randomness flows through [`noisegen::SeededSource`]; a run is fully
//! determined by its master seed, regardless of worker-thread count.

pub mod filters;
pub mod harness;
pub mod noisegen;
pub mod varest;

pub use filters::{
    algorithm_step, bcnlms_step, bcnmcc_step, bias_vector, kernel_weight, lms_step, mcc_step,
    nlms_step, nmcc_step, predict, AlgorithmKind, BiasInputs, CompensationWeight, FilterConfig,
    FilterError, Regressor, StepOutcome, WeightVector,
};
pub use harness::{
    default_step_size, msd, ratio_to_db, reduce_trials, run_scenario, run_trial,
    steady_state_msd, CompensationMode, CurveSet, ExperimentSpec, HarnessError, MsdCurve,
    OutputNoiseLaw, PlantSample, RunMetadata, SampleStream, Scenario, ScenarioResult,
    ScenarioSchedule, Stage, SummaryRow, SystemModel, TrialContext, VarianceMode,
    DB_FLOOR, DEFAULT_KERNEL_BANDWIDTH, DEFAULT_REGULARIZATION, DEFAULT_VAREST_CLIP_PERCENTILE,
    DEFAULT_VAREST_FORGETTING, DEFAULT_VAREST_KAPPA, INPUT_VARIANCE_SWEEP_GRID, SIGMA_SWEEP_GRID,
    STEADY_STATE_WINDOW,
};
pub use noisegen::{
    empirical_cf, sample_alpha_stable, sample_gaussian, AlphaStableParams, GaussianParams,
    NoiseError, SeededSource, GENERATOR_NAME,
};
pub use varest::{VarEstError, VarEstState, VarianceEstimate};
