//! Adaptive-filter update rules for noisy-input system identification.
//!
//! All six rules estimate a length-`L` weight vector `w` from a stream of
//! (regressor, desired output) pairs. With prediction error
//! `e = d − uᵀw`, regressor energy `uᵀu`, step size `μ`, kernel bandwidth
//! `σ`, regularizer `ε`, and assumed input-noise variance `σ²_in`:
//!
//! ```text
//! lms      w⁺ = w + μ e u
//! nlms     w⁺ = w + μ e u / (uᵀu + ε)
//! mcc      w⁺ = w + μ exp(−e²/2σ²) e u
//! nmcc     w⁺ = w + μ exp(−e²/2σ²) e u / (uᵀu + ε)
//! bcnlms   w⁺ = w + μ e u / (uᵀu + ε)                + μ σ²_in w / (uᵀu + ε)
//! bcnmcc   w⁺ = w + μ exp(−e²/2σ²) e u / (uᵀu + ε)   + μ k_c σ²_in w / (uᵀu + ε)
//! ```
//!
//! The kernel factor `exp(−e²/2σ²)` suppresses impulsive errors: a large
//! outlier drives it toward zero, freezing the update instead of scattering
//! the weights. The trailing term of the bias-compensated rules counteracts
//! the shrinkage bias that input noise induces (noisy regressors pull the
//! uncompensated estimate toward zero); `k_c` is the compensation weight —
//! by default the same observable kernel factor, or, when the true output
//! disturbance is available to an oracle, its kernel factor instead.
//!
//! Every rule reports its work through [`StepOutcome`] and leaves the input
//! weights untouched, so callers own the state-update policy.

use thiserror::Error;

/// Errors from configuration and step evaluation.
#[derive(Debug, Error, PartialEq)]
pub enum FilterError {
    #[error("step size must be > 0 and finite, got {0}")]
    StepSizeOutOfRange(f64),
    #[error("kernel bandwidth must be > 0 and finite, got {0}")]
    BandwidthOutOfRange(f64),
    #[error("regularization must be >= 0 and finite, got {0}")]
    RegularizationOutOfRange(f64),
    #[error("tap count must be >= 1")]
    ZeroTaps,
    #[error("vector must be non-empty with all components finite")]
    InvalidVector,
    #[error("length mismatch: weights {weights}, regressor {regressor}, configured taps {taps}")]
    LengthMismatch {
        weights: usize,
        regressor: usize,
        taps: usize,
    },
    #[error("input-noise variance must be >= 0 and finite, got {0}")]
    NegativeVariance(f64),
    #[error("compensation weight must lie in [0, 1], got {0}")]
    CompensationWeightOutOfRange(f64),
    #[error("regressor energy plus regularization is zero; bias term undefined")]
    DegenerateRegressor,
    #[error("unknown algorithm '{0}' (expected one of: lms, nlms, mcc, nmcc, bcnlms, bcnmcc)")]
    UnknownAlgorithm(String),
    #[error("update produced a non-finite weight")]
    NonFiniteUpdate,
}

/// Filter weight vector; non-empty, every component finite.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(values: Vec<f64>) -> Result<Self, FilterError> {
        if values.is_empty() || values.iter().any(|x| !x.is_finite()) {
            return Err(FilterError::InvalidVector);
        }
        Ok(Self(values))
    }

    /// The all-zero initial state used at the start of every trial.
    pub fn zeros(taps: usize) -> Self {
        Self(vec![0.0; taps.max(1)])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Regressor (input window), newest sample first; non-empty, finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Regressor(Vec<f64>);

impl Regressor {
    pub fn new(values: Vec<f64>) -> Result<Self, FilterError> {
        if values.is_empty() || values.iter().any(|x| !x.is_finite()) {
            return Err(FilterError::InvalidVector);
        }
        Ok(Self(values))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Squared Euclidean norm `uᵀu`.
    pub fn energy(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum()
    }
}

/// Identifier for one of the six update rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AlgorithmKind {
    Lms,
    Nlms,
    Mcc,
    Nmcc,
    Bcnlms,
    Bcnmcc,
}

impl AlgorithmKind {
    /// All rules, in canonical presentation order.
    pub const ALL: [AlgorithmKind; 6] = [
        AlgorithmKind::Lms,
        AlgorithmKind::Nlms,
        AlgorithmKind::Mcc,
        AlgorithmKind::Nmcc,
        AlgorithmKind::Bcnlms,
        AlgorithmKind::Bcnmcc,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            AlgorithmKind::Lms => "lms",
            AlgorithmKind::Nlms => "nlms",
            AlgorithmKind::Mcc => "mcc",
            AlgorithmKind::Nmcc => "nmcc",
            AlgorithmKind::Bcnlms => "bcnlms",
            AlgorithmKind::Bcnmcc => "bcnmcc",
        }
    }

    /// Whether the rule carries the input-noise bias-compensation term.
    pub fn is_bias_compensated(&self) -> bool {
        matches!(self, AlgorithmKind::Bcnlms | AlgorithmKind::Bcnmcc)
    }
}

impl std::fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for AlgorithmKind {
    type Err = FilterError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lms" => Ok(AlgorithmKind::Lms),
            "nlms" => Ok(AlgorithmKind::Nlms),
            "mcc" => Ok(AlgorithmKind::Mcc),
            "nmcc" => Ok(AlgorithmKind::Nmcc),
            "bcnlms" => Ok(AlgorithmKind::Bcnlms),
            "bcnmcc" => Ok(AlgorithmKind::Bcnmcc),
            other => Err(FilterError::UnknownAlgorithm(other.to_string())),
        }
    }
}

/// Static per-rule tuning; validated once at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterConfig {
    step_size: f64,
    kernel_bandwidth: f64,
    regularization: f64,
    taps: usize,
}

impl FilterConfig {
    /// `step_size` must be positive; `kernel_bandwidth` must be positive
    /// (it is simply unused by the kernel-free rules); `regularization`
    /// must be non-negative; `taps` at least 1.
    pub fn new(
        step_size: f64,
        kernel_bandwidth: f64,
        regularization: f64,
        taps: usize,
    ) -> Result<Self, FilterError> {
        if !step_size.is_finite() || step_size <= 0.0 {
            return Err(FilterError::StepSizeOutOfRange(step_size));
        }
        if !kernel_bandwidth.is_finite() || kernel_bandwidth <= 0.0 {
            return Err(FilterError::BandwidthOutOfRange(kernel_bandwidth));
        }
        if !regularization.is_finite() || regularization < 0.0 {
            return Err(FilterError::RegularizationOutOfRange(regularization));
        }
        if taps == 0 {
            return Err(FilterError::ZeroTaps);
        }
        Ok(Self {
            step_size,
            kernel_bandwidth,
            regularization,
            taps,
        })
    }

    pub fn step_size(&self) -> f64 {
        self.step_size
    }

    pub fn kernel_bandwidth(&self) -> f64 {
        self.kernel_bandwidth
    }

    pub fn regularization(&self) -> f64 {
        self.regularization
    }

    pub fn taps(&self) -> usize {
        self.taps
    }

    /// Copy of this configuration with a different step size — used when a
    /// schedule changes `μ` between stages while everything else is fixed.
    pub fn with_step_size(&self, step_size: f64) -> Result<Self, FilterError> {
        Self::new(
            step_size,
            self.kernel_bandwidth,
            self.regularization,
            self.taps,
        )
    }
}

/// Everything one update produced. The caller decides whether to adopt
/// `weights` as the new state.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    /// Updated weight vector (equals the input weights when `skipped`).
    pub weights: WeightVector,
    /// Prediction error `e = d − uᵀw` evaluated at the input weights.
    pub error: f64,
    /// Kernel factor applied to the gradient term; exactly 1 for the
    /// kernel-free rules.
    pub kernel_weight: f64,
    /// Bias-compensation term added to the weights; all-zero for the
    /// uncompensated rules.
    pub bias: Vec<f64>,
    /// True when a normalized rule met a zero-energy regressor with zero
    /// regularization and declined to divide by zero; the weights pass
    /// through unchanged.
    pub skipped: bool,
}

/// How the bias-compensation kernel factor `k_c` is obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CompensationWeight {
    /// Evaluate the kernel on the observable prediction error (default).
    Observed,
    /// Evaluate the kernel on the true output disturbance, known only to a
    /// simulation oracle. Carries that disturbance value.
    Oracle(f64),
}

/// Per-step side information consumed by the bias-compensated rules and
/// ignored by the rest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasInputs {
    /// Assumed variance of the noise on the regressor samples.
    pub input_noise_variance: f64,
    /// Source of the compensation kernel factor.
    pub compensation: CompensationWeight,
}

impl BiasInputs {
    /// Side information for the uncompensated rules: zero variance,
    /// observed weighting. With these inputs the compensated rules reduce
    /// exactly to their uncompensated counterparts.
    pub fn none() -> Self {
        Self {
            input_noise_variance: 0.0,
            compensation: CompensationWeight::Observed,
        }
    }
}

/// Inner product `uᵀw` of a regressor with a weight vector.
///
/// Lengths must already agree; the public step functions check.
pub fn predict(weights: &WeightVector, regressor: &Regressor) -> f64 {
    weights
        .as_slice()
        .iter()
        .zip(regressor.as_slice())
        .map(|(w, u)| w * u)
        .sum()
}

/// Gaussian kernel factor `exp(−e²/(2σ²))`.
///
/// Bounded in (0, 1] for any finite error; for errors so large that the
/// exponent underflows it degrades smoothly to +0.0 rather than NaN.
/// `bandwidth` must be positive (enforced by [`FilterConfig`]).
pub fn kernel_weight(error: f64, bandwidth: f64) -> f64 {
    debug_assert!(bandwidth > 0.0, "kernel bandwidth must be positive");
    (-(error * error) / (2.0 * bandwidth * bandwidth)).exp()
}

fn check_lengths(
    weights: &WeightVector,
    regressor: &Regressor,
    cfg: &FilterConfig,
) -> Result<(), FilterError> {
    if weights.len() != regressor.len() || weights.len() != cfg.taps() {
        return Err(FilterError::LengthMismatch {
            weights: weights.len(),
            regressor: regressor.len(),
            taps: cfg.taps(),
        });
    }
    Ok(())
}

fn finish(
    values: Vec<f64>,
    error: f64,
    kernel: f64,
    bias: Vec<f64>,
    skipped: bool,
) -> Result<StepOutcome, FilterError> {
    let weights = WeightVector::new(values).map_err(|_| FilterError::NonFiniteUpdate)?;
    Ok(StepOutcome {
        weights,
        error,
        kernel_weight: kernel,
        bias,
        skipped,
    })
}

/// Shared body of the four gradient rules without bias compensation.
/// `kernel` is the factor multiplying the gradient; `denominator` is
/// `uᵀu + ε` for the normalized rules or exactly 1 for the rest.
fn gradient_step(
    weights: &WeightVector,
    regressor: &Regressor,
    desired: f64,
    kernel: f64,
    normalized: bool,
    cfg: &FilterConfig,
) -> Result<StepOutcome, FilterError> {
    check_lengths(weights, regressor, cfg)?;
    let error = desired - predict(weights, regressor);
    let zero_bias = vec![0.0; weights.len()];

    let denominator = if normalized {
        let den = regressor.energy() + cfg.regularization();
        if den == 0.0 {
            // Zero-energy regressor with zero regularization: the update is
            // undefined, so report the step as skipped instead of dividing.
            return finish(
                weights.as_slice().to_vec(),
                error,
                kernel,
                zero_bias,
                true,
            );
        }
        den
    } else {
        1.0
    };

    let gain = cfg.step_size() * kernel * error / denominator;
    let updated = weights
        .as_slice()
        .iter()
        .zip(regressor.as_slice())
        .map(|(w, u)| w + gain * u)
        .collect();
    finish(updated, error, kernel, zero_bias, false)
}

/// Least-mean-squares update `w⁺ = w + μ e u`.
pub fn lms_step(
    weights: &WeightVector,
    regressor: &Regressor,
    desired: f64,
    cfg: &FilterConfig,
) -> Result<StepOutcome, FilterError> {
    gradient_step(weights, regressor, desired, 1.0, false, cfg)
}

/// Normalized LMS update `w⁺ = w + μ e u / (uᵀu + ε)`.
pub fn nlms_step(
    weights: &WeightVector,
    regressor: &Regressor,
    desired: f64,
    cfg: &FilterConfig,
) -> Result<StepOutcome, FilterError> {
    gradient_step(weights, regressor, desired, 1.0, true, cfg)
}

/// Maximum-correntropy update `w⁺ = w + μ exp(−e²/2σ²) e u`.
pub fn mcc_step(
    weights: &WeightVector,
    regressor: &Regressor,
    desired: f64,
    cfg: &FilterConfig,
) -> Result<StepOutcome, FilterError> {
    check_lengths(weights, regressor, cfg)?;
    let error = desired - predict(weights, regressor);
    let kernel = kernel_weight(error, cfg.kernel_bandwidth());
    gradient_step(weights, regressor, desired, kernel, false, cfg)
}

/// Normalized maximum-correntropy update
/// `w⁺ = w + μ exp(−e²/2σ²) e u / (uᵀu + ε)`.
pub fn nmcc_step(
    weights: &WeightVector,
    regressor: &Regressor,
    desired: f64,
    cfg: &FilterConfig,
) -> Result<StepOutcome, FilterError> {
    check_lengths(weights, regressor, cfg)?;
    let error = desired - predict(weights, regressor);
    let kernel = kernel_weight(error, cfg.kernel_bandwidth());
    gradient_step(weights, regressor, desired, kernel, true, cfg)
}

/// Bias-compensation term `B = μ k_c σ²_in w / (uᵀu + ε)`.
///
/// `kernel_factor` is `k_c ∈ [0, 1]`; the denominator must be positive,
/// otherwise the term is undefined and an error is returned.
pub fn bias_vector(
    weights: &WeightVector,
    regressor: &Regressor,
    input_noise_variance: f64,
    kernel_factor: f64,
    cfg: &FilterConfig,
) -> Result<Vec<f64>, FilterError> {
    check_lengths(weights, regressor, cfg)?;
    if !input_noise_variance.is_finite() || input_noise_variance < 0.0 {
        return Err(FilterError::NegativeVariance(input_noise_variance));
    }
    if !kernel_factor.is_finite() || !(0.0..=1.0).contains(&kernel_factor) {
        return Err(FilterError::CompensationWeightOutOfRange(kernel_factor));
    }
    let denominator = regressor.energy() + cfg.regularization();
    if denominator == 0.0 {
        return Err(FilterError::DegenerateRegressor);
    }
    let scale = cfg.step_size() * kernel_factor * input_noise_variance / denominator;
    Ok(weights.as_slice().iter().map(|w| scale * w).collect())
}

/// Shared body of the two bias-compensated rules. `gradient_kernel`
/// multiplies the error term; `compensation_kernel` multiplies the bias
/// term (both are exactly 1 for bcnlms).
fn compensated_step(
    weights: &WeightVector,
    regressor: &Regressor,
    desired: f64,
    input_noise_variance: f64,
    gradient_kernel: f64,
    compensation_kernel: f64,
    cfg: &FilterConfig,
) -> Result<StepOutcome, FilterError> {
    check_lengths(weights, regressor, cfg)?;
    if !input_noise_variance.is_finite() || input_noise_variance < 0.0 {
        return Err(FilterError::NegativeVariance(input_noise_variance));
    }
    let error = desired - predict(weights, regressor);
    let denominator = regressor.energy() + cfg.regularization();
    if denominator == 0.0 {
        return finish(
            weights.as_slice().to_vec(),
            error,
            gradient_kernel,
            vec![0.0; weights.len()],
            true,
        );
    }

    let bias_scale =
        cfg.step_size() * compensation_kernel * input_noise_variance / denominator;
    let gain = cfg.step_size() * gradient_kernel * error / denominator;
    let bias: Vec<f64> = weights.as_slice().iter().map(|w| bias_scale * w).collect();
    let updated = weights
        .as_slice()
        .iter()
        .zip(regressor.as_slice())
        .zip(&bias)
        .map(|((w, u), b)| w + b + gain * u)
        .collect();
    finish(updated, error, gradient_kernel, bias, false)
}

/// Bias-compensated NLMS update (kernel factors fixed at 1):
/// `w⁺ = w + μ e u / (uᵀu + ε) + μ σ²_in w / (uᵀu + ε)`.
pub fn bcnlms_step(
    weights: &WeightVector,
    regressor: &Regressor,
    desired: f64,
    input_noise_variance: f64,
    cfg: &FilterConfig,
) -> Result<StepOutcome, FilterError> {
    compensated_step(
        weights,
        regressor,
        desired,
        input_noise_variance,
        1.0,
        1.0,
        cfg,
    )
}

/// Bias-compensated NMCC update with the observable compensation weight
/// `k_c = exp(−e²/2σ²)`:
/// `w⁺ = w + μ exp(−e²/2σ²) e u / (uᵀu + ε) + μ k_c σ²_in w / (uᵀu + ε)`.
pub fn bcnmcc_step(
    weights: &WeightVector,
    regressor: &Regressor,
    desired: f64,
    input_noise_variance: f64,
    cfg: &FilterConfig,
) -> Result<StepOutcome, FilterError> {
    check_lengths(weights, regressor, cfg)?;
    let error = desired - predict(weights, regressor);
    let kernel = kernel_weight(error, cfg.kernel_bandwidth());
    compensated_step(
        weights,
        regressor,
        desired,
        input_noise_variance,
        kernel,
        kernel,
        cfg,
    )
}

/// Single entry point dispatching to the six rules.
///
/// `bias` supplies the input-noise variance and compensation-weight policy
/// for the bias-compensated rules; the others ignore it entirely.
pub fn algorithm_step(
    kind: AlgorithmKind,
    weights: &WeightVector,
    regressor: &Regressor,
    desired: f64,
    cfg: &FilterConfig,
    bias: &BiasInputs,
) -> Result<StepOutcome, FilterError> {
    match kind {
        AlgorithmKind::Lms => lms_step(weights, regressor, desired, cfg),
        AlgorithmKind::Nlms => nlms_step(weights, regressor, desired, cfg),
        AlgorithmKind::Mcc => mcc_step(weights, regressor, desired, cfg),
        AlgorithmKind::Nmcc => nmcc_step(weights, regressor, desired, cfg),
        AlgorithmKind::Bcnlms => bcnlms_step(
            weights,
            regressor,
            desired,
            bias.input_noise_variance,
            cfg,
        ),
        AlgorithmKind::Bcnmcc => {
            check_lengths(weights, regressor, cfg)?;
            let error = desired - predict(weights, regressor);
            let gradient_kernel = kernel_weight(error, cfg.kernel_bandwidth());
            let compensation_kernel = match bias.compensation {
                CompensationWeight::Observed => gradient_kernel,
                CompensationWeight::Oracle(disturbance) => {
                    kernel_weight(disturbance, cfg.kernel_bandwidth())
                }
            };
            compensated_step(
                weights,
                regressor,
                desired,
                bias.input_noise_variance,
                gradient_kernel,
                compensation_kernel,
                cfg,
            )
        }
    }
}
