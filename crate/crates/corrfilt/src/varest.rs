//! Recursive input-noise variance estimation from observable quantities.
//!
//! The bias-compensated rules in [`crate::filters`] need the variance of
//! the noise riding on the regressor samples. It is not observable
//! directly, but it can be estimated online from the prediction error and
//! the current weights. With forgetting factor `a`, tap count `L`,
//! input-output noise ratio `κ`, and regressor energy `ūᵀū`:
//!
//! ```text
//! σ²_ē(i) = a σ²_ē(i−1) + (1−a) ē²(i)          error power
//! σ²_w(i) = a σ²_w(i−1) + (1−a) wᵀw / L        weight power
//! σ̂²_in(i) = σ²_ē / (L σ²_w + κ + σ²_ē L / ūᵀū)
//! ```
//!
//! Both powers start at zero and smooth their inputs exponentially: a
//! single impulsive error perturbs `σ²_ē` by only `(1−a)·ē²` and the
//! perturbation decays geometrically. The estimate itself is bounded — as
//! `σ²_ē` grows without bound it saturates at `ūᵀū / L` — so one outlier
//! can never inject an unbounded compensation term.
//!
//! # Outlier guard
//!
//! Under heavy-tailed disturbances the smoothing above bounds each
//! impulse's instantaneous effect but not its total: a squared error of
//! 10⁴ still deposits its full weight into `σ²_ē` over the following
//! decay constant, and during that excursion the compensation term
//! overshoots. [`VarEstState::with_clip_percentile`] adds an optional
//! guard that clips each incoming `ē²` at the q-th percentile of the most
//! recent squared errors before it enters the error-power recursion. The
//! percentile is exact over a fixed 128-sample window, so the guard's
//! state stays bounded, it adapts within a window length when the
//! disturbance regime changes, and it engages only once the window has
//! filled — start-up transients, whose large errors are genuine, pass
//! through unclipped. The window observes raw squared errors, never
//! clipped ones, so the threshold cannot ratchet itself downward.

use crate::filters::{Regressor, WeightVector};
use thiserror::Error;

/// Errors from estimator construction and updates.
#[derive(Debug, Error, PartialEq)]
pub enum VarEstError {
    #[error("forgetting factor must lie in [0, 1), got {0}")]
    ForgettingOutOfRange(f64),
    #[error("noise-ratio constant kappa must be > 0 and finite, got {0}")]
    KappaOutOfRange(f64),
    #[error("tap count must be >= 1")]
    ZeroTaps,
    #[error("weight vector has {got} taps, estimator is configured for {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("error value must be finite, got {0}")]
    NonFiniteError(f64),
    #[error("clip percentile must lie in (0, 100), got {0}")]
    ClipPercentileOutOfRange(f64),
}

/// Number of recent squared errors the outlier guard ranks.
const CLIP_WINDOW: usize = 128;

/// Exact q-th percentile over a sliding window of squared errors.
///
/// Keeps the window twice: in arrival order (to know which value falls
/// out) and sorted (to read the percentile by rank). Insertion keeps the
/// sorted copy ordered in O(window) time, which is negligible next to a
/// filter iteration.
#[derive(Debug, Clone, PartialEq)]
struct ClipWindow {
    percentile: f64,
    arrivals: std::collections::VecDeque<f64>,
    sorted: Vec<f64>,
}

impl ClipWindow {
    fn new(percentile: f64) -> Self {
        Self {
            percentile,
            arrivals: std::collections::VecDeque::with_capacity(CLIP_WINDOW),
            sorted: Vec::with_capacity(CLIP_WINDOW),
        }
    }

    /// Current clipping threshold, available once the window has filled:
    /// the k-th smallest of the window where k = ⌈q/100 · window⌉.
    fn threshold(&self) -> Option<f64> {
        if self.sorted.len() < CLIP_WINDOW {
            return None;
        }
        let rank = (self.percentile / 100.0 * self.sorted.len() as f64).ceil() as usize;
        Some(self.sorted[rank.clamp(1, self.sorted.len()) - 1])
    }

    /// Record one raw squared error, evicting the oldest once full.
    fn observe(&mut self, value: f64) {
        if self.arrivals.len() == CLIP_WINDOW {
            let oldest = self.arrivals.pop_front().expect("window is non-empty");
            let at = self
                .sorted
                .binary_search_by(|probe| probe.total_cmp(&oldest))
                .expect("evicted value is present in the sorted copy");
            self.sorted.remove(at);
        }
        self.arrivals.push_back(value);
        let at = match self.sorted.binary_search_by(|probe| probe.total_cmp(&value)) {
            Ok(at) | Err(at) => at,
        };
        self.sorted.insert(at, value);
    }

    fn clear(&mut self) {
        self.arrivals.clear();
        self.sorted.clear();
    }
}

/// Input-noise variance estimate plus how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceEstimate {
    /// The estimate `σ̂²_in ≥ 0`.
    pub value: f64,
    /// True when the regressor energy was zero and the regularized
    /// fallback produced the value (the estimate is 0 in that case).
    pub degenerate_input: bool,
}

/// Recursive estimator state: the two smoothed powers plus fixed tuning.
#[derive(Debug, Clone, PartialEq)]
pub struct VarEstState {
    err_power: f64,
    weight_power: f64,
    forgetting: f64,
    kappa: f64,
    taps: usize,
    clip: Option<ClipWindow>,
}

impl VarEstState {
    /// Powers start at zero; `forgetting ∈ [0, 1)`, `kappa > 0`, `taps ≥ 1`.
    pub fn new(forgetting: f64, kappa: f64, taps: usize) -> Result<Self, VarEstError> {
        if !forgetting.is_finite() || !(0.0..1.0).contains(&forgetting) {
            return Err(VarEstError::ForgettingOutOfRange(forgetting));
        }
        if !kappa.is_finite() || kappa <= 0.0 {
            return Err(VarEstError::KappaOutOfRange(kappa));
        }
        if taps == 0 {
            return Err(VarEstError::ZeroTaps);
        }
        Ok(Self {
            err_power: 0.0,
            weight_power: 0.0,
            forgetting,
            kappa,
            taps,
            clip: None,
        })
    }

    /// Enable the outlier guard: each incoming squared error is clipped at
    /// the `percentile`-th percentile of the last 128 squared errors
    /// before it enters the error-power recursion. `percentile ∈ (0, 100)`.
    pub fn with_clip_percentile(mut self, percentile: f64) -> Result<Self, VarEstError> {
        if !percentile.is_finite() || percentile <= 0.0 || percentile >= 100.0 {
            return Err(VarEstError::ClipPercentileOutOfRange(percentile));
        }
        self.clip = Some(ClipWindow::new(percentile));
        Ok(self)
    }

    /// The guard's percentile, if the guard is enabled.
    pub fn clip_percentile(&self) -> Option<f64> {
        self.clip.as_ref().map(|c| c.percentile)
    }

    pub fn err_power(&self) -> f64 {
        self.err_power
    }

    pub fn weight_power(&self) -> f64 {
        self.weight_power
    }

    pub fn forgetting(&self) -> f64 {
        self.forgetting
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn taps(&self) -> usize {
        self.taps
    }

    /// Zero both powers and forget the guard's window, as at the start of
    /// a fresh trial.
    pub fn reset(&mut self) {
        self.err_power = 0.0;
        self.weight_power = 0.0;
        if let Some(clip) = &mut self.clip {
            clip.clear();
        }
    }

    /// Fold one prediction error into the smoothed error power and return
    /// the new power. With the guard enabled and its window full, the
    /// squared error is clipped at the window percentile first; the
    /// window itself always records the raw value.
    pub fn update_error_power(&mut self, error: f64) -> Result<f64, VarEstError> {
        if !error.is_finite() {
            return Err(VarEstError::NonFiniteError(error));
        }
        let mut squared = error * error;
        if let Some(clip) = &mut self.clip {
            if let Some(bound) = clip.threshold() {
                squared = squared.min(bound);
            }
            clip.observe(error * error);
        }
        self.err_power = self.forgetting * self.err_power + (1.0 - self.forgetting) * squared;
        Ok(self.err_power)
    }

    /// Fold the current weights into the smoothed per-tap weight power and
    /// return the new power.
    pub fn update_weight_power(&mut self, weights: &WeightVector) -> Result<f64, VarEstError> {
        if weights.len() != self.taps {
            return Err(VarEstError::LengthMismatch {
                got: weights.len(),
                expected: self.taps,
            });
        }
        let energy: f64 = weights.as_slice().iter().map(|w| w * w).sum();
        self.weight_power = self.forgetting * self.weight_power
            + (1.0 - self.forgetting) * energy / self.taps as f64;
        Ok(self.weight_power)
    }

    /// Current input-noise variance estimate given the regressor.
    ///
    /// A zero-energy regressor first has `epsilon` added to its energy;
    /// if the energy is still zero the estimate is 0 (its exact limit as
    /// the energy vanishes with positive error power) and the result is
    /// flagged as degenerate.
    pub fn estimate_input_variance(
        &self,
        regressor: &Regressor,
        epsilon: f64,
    ) -> VarianceEstimate {
        let taps = self.taps as f64;
        let mut energy = regressor.energy();
        let mut degenerate = false;
        if energy == 0.0 {
            energy += epsilon.max(0.0);
            degenerate = true;
            if energy == 0.0 {
                return VarianceEstimate {
                    value: 0.0,
                    degenerate_input: true,
                };
            }
        }
        let denominator = taps * self.weight_power + self.kappa + self.err_power * taps / energy;
        VarianceEstimate {
            value: self.err_power / denominator,
            degenerate_input: degenerate,
        }
    }
}
