//! JSON experiment configuration: parsing, validation, and conversion
//! into the library's experiment description.
//!
//! Validation walks the raw JSON tree against the schema by hand so that
//! every diagnostic carries the full key path (`filters.mcc.sigma`) and
//! unknown keys come back with a nearest-match suggestion.

use corrfilt::{
    default_step_size, AlgorithmKind, AlphaStableParams, CompensationMode, ExperimentSpec,
    FilterConfig, GaussianParams, OutputNoiseLaw, Scenario, SystemModel, VarianceMode,
    WeightVector, DEFAULT_KERNEL_BANDWIDTH, DEFAULT_REGULARIZATION,
    DEFAULT_VAREST_CLIP_PERCENTILE, DEFAULT_VAREST_FORGETTING, DEFAULT_VAREST_KAPPA,
};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

/// A configuration problem: malformed document, unknown key, missing
/// field, or invariant violation. Always names the offending field.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(message.into()))
}

/// Fully validated experiment description, still carrying the
/// CLI-level fields (output directory, plot toggle) that the library
/// does not know about.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub algorithms: Vec<AlgorithmKind>,
    pub model: SystemModel,
    pub filters: BTreeMap<AlgorithmKind, FilterConfig>,
    pub stage2_step_sizes: BTreeMap<AlgorithmKind, f64>,
    pub varest_forgetting: f64,
    pub varest_kappa: f64,
    /// Percentile for the variance estimator's outlier guard; `None`
    /// turns the guard off.
    pub varest_clip_percentile: Option<f64>,
    pub trials: usize,
    pub iterations_per_stage: usize,
    /// Seed from the file itself; the effective seed may instead come
    /// from the command line or the environment.
    pub master_seed: Option<u64>,
    pub output_dir: PathBuf,
    pub plot: bool,
    pub workers: usize,
    pub variance_mode: VarianceMode,
    pub compensation: CompensationMode,
}

const ROOT_KEYS: &[&str] = &[
    "scenario",
    "algorithms",
    "model",
    "filters",
    "stage2_step_sizes",
    "varest",
    "trials",
    "iterations_per_stage",
    "master_seed",
    "output_dir",
    "plot",
    "workers",
    "variance_mode",
    "compensation",
];
const MODEL_KEYS: &[&str] = &[
    "true_weights",
    "input",
    "input_noise_variance",
    "output_noise",
];
const INPUT_KEYS: &[&str] = &["mean", "variance"];
const NOISE_KEYS: &[&str] = &["alpha", "beta", "gamma", "theta"];
const FILTER_KEYS: &[&str] = &["step_size", "sigma", "epsilon"];
const VAREST_KEYS: &[&str] = &["forgetting", "kappa", "clip_percentile"];

fn algorithm_names() -> Vec<&'static str> {
    AlgorithmKind::ALL.iter().map(|a| a.name()).collect()
}

/// `(did you mean 'sigma'?)` when some expected key is within edit
/// distance 2 of the unknown one.
fn suggestion(unknown: &str, expected: &[&str]) -> String {
    expected
        .iter()
        .map(|k| (strsim::levenshtein(unknown, k), *k))
        .min()
        .filter(|(d, _)| *d <= 2)
        .map(|(_, k)| format!(" (did you mean '{k}'?)"))
        .unwrap_or_default()
}

fn join_path(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn check_keys(obj: &Map<String, Value>, expected: &[&str], path: &str) -> Result<(), ConfigError> {
    for key in obj.keys() {
        if !expected.contains(&key.as_str()) {
            return err(format!(
                "unknown key '{}'{}",
                join_path(path, key),
                suggestion(key, expected)
            ));
        }
    }
    Ok(())
}

fn as_object<'a>(value: &'a Value, path: &str) -> Result<&'a Map<String, Value>, ConfigError> {
    value
        .as_object()
        .ok_or_else(|| ConfigError(format!("'{path}' must be an object")))
}

fn required<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value, ConfigError> {
    obj.get(key)
        .ok_or_else(|| ConfigError(format!("missing required field '{}'", join_path(path, key))))
}

fn number(value: &Value, path: &str) -> Result<f64, ConfigError> {
    match value.as_f64() {
        Some(x) if x.is_finite() => Ok(x),
        _ => err(format!("'{path}' must be a finite number")),
    }
}

fn unsigned(value: &Value, path: &str) -> Result<u64, ConfigError> {
    value
        .as_u64()
        .ok_or_else(|| ConfigError(format!("'{path}' must be a non-negative integer")))
}

fn string<'a>(value: &'a Value, path: &str) -> Result<&'a str, ConfigError> {
    value
        .as_str()
        .ok_or_else(|| ConfigError(format!("'{path}' must be a string")))
}

fn boolean(value: &Value, path: &str) -> Result<bool, ConfigError> {
    value
        .as_bool()
        .ok_or_else(|| ConfigError(format!("'{path}' must be a boolean")))
}

fn algorithm(name: &str, path: &str) -> Result<AlgorithmKind, ConfigError> {
    name.parse().map_err(|_| {
        ConfigError(format!(
            "'{path}': unknown algorithm '{name}'{}",
            suggestion(name, &algorithm_names())
        ))
    })
}

fn parse_model(value: &Value) -> Result<SystemModel, ConfigError> {
    let obj = as_object(value, "model")?;
    check_keys(obj, MODEL_KEYS, "model")?;

    let weights_value = required(obj, "true_weights", "model")?;
    let weights_arr = weights_value
        .as_array()
        .ok_or_else(|| ConfigError("'model.true_weights' must be an array of numbers".into()))?;
    let mut weights = Vec::with_capacity(weights_arr.len());
    for (i, w) in weights_arr.iter().enumerate() {
        weights.push(number(w, &format!("model.true_weights[{i}]"))?);
    }
    let true_weights = WeightVector::new(weights)
        .map_err(|e| ConfigError(format!("'model.true_weights': {e}")))?;

    let input_obj = as_object(required(obj, "input", "model")?, "model.input")?;
    check_keys(input_obj, INPUT_KEYS, "model.input")?;
    let mean = number(required(input_obj, "mean", "model.input")?, "model.input.mean")?;
    let variance = number(
        required(input_obj, "variance", "model.input")?,
        "model.input.variance",
    )?;
    let input = GaussianParams::new(mean, variance)
        .map_err(|e| ConfigError(format!("'model.input': {e}")))?;

    let input_noise_variance = number(
        required(obj, "input_noise_variance", "model")?,
        "model.input_noise_variance",
    )?;

    let output_noise = match required(obj, "output_noise", "model")? {
        Value::String(s) if s == "noiseless" => OutputNoiseLaw::Noiseless,
        Value::String(s) => {
            return err(format!(
                "'model.output_noise': expected 'noiseless' or an object, got '{s}'"
            ))
        }
        value => {
            let noise_obj = as_object(value, "model.output_noise")?;
            check_keys(noise_obj, NOISE_KEYS, "model.output_noise")?;
            let field = |key: &str| -> Result<f64, ConfigError> {
                number(
                    required(noise_obj, key, "model.output_noise")?,
                    &format!("model.output_noise.{key}"),
                )
            };
            let params = AlphaStableParams::new(
                field("alpha")?,
                field("beta")?,
                field("gamma")?,
                field("theta")?,
            )
            .map_err(|e| ConfigError(format!("'model.output_noise': {e}")))?;
            OutputNoiseLaw::AlphaStable(params)
        }
    };

    SystemModel::new(true_weights, input, input_noise_variance, output_noise)
        .map_err(|e| ConfigError(format!("'model': {e}")))
}

fn parse_filter(
    algorithm: AlgorithmKind,
    value: &Value,
    taps: usize,
) -> Result<FilterConfig, ConfigError> {
    let path = format!("filters.{}", algorithm.name());
    let obj = as_object(value, &path)?;
    check_keys(obj, FILTER_KEYS, &path)?;
    let field = |key: &str, default: f64| -> Result<f64, ConfigError> {
        match obj.get(key) {
            Some(v) => number(v, &format!("{path}.{key}")),
            None => Ok(default),
        }
    };
    let step_size = field("step_size", default_step_size(algorithm))?;
    let sigma = field("sigma", DEFAULT_KERNEL_BANDWIDTH)?;
    let epsilon = field("epsilon", DEFAULT_REGULARIZATION)?;
    FilterConfig::new(step_size, sigma, epsilon, taps)
        .map_err(|e| ConfigError(format!("'{path}': {e}")))
}

/// Parse and validate a configuration document.
pub fn parse_config_text(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let root: Value = serde_json::from_str(text)
        .map_err(|e| ConfigError(format!("malformed JSON: {e}")))?;
    let obj = as_object(&root, "<config>")?;
    check_keys(obj, ROOT_KEYS, "")?;

    let scenario: Scenario = string(required(obj, "scenario", "")?, "scenario")?
        .parse()
        .map_err(|e| ConfigError(format!("'scenario': {e}")))?;

    let model = parse_model(required(obj, "model", "")?)?;
    let taps = model.taps();

    let algorithms = match obj.get("algorithms") {
        None => AlgorithmKind::ALL.to_vec(),
        Some(value) => {
            let arr = value
                .as_array()
                .ok_or_else(|| ConfigError("'algorithms' must be an array of names".into()))?;
            let mut list = Vec::with_capacity(arr.len());
            for (i, entry) in arr.iter().enumerate() {
                let path = format!("algorithms[{i}]");
                let kind = algorithm(string(entry, &path)?, &path)?;
                if list.contains(&kind) {
                    return err(format!("'{path}': duplicate algorithm '{kind}'"));
                }
                list.push(kind);
            }
            list
        }
    };

    let filters_obj = as_object(required(obj, "filters", "")?, "filters")?;
    let mut filters = BTreeMap::new();
    for (name, value) in filters_obj {
        let kind = algorithm(name, &format!("filters.{name}"))?;
        filters.insert(kind, parse_filter(kind, value, taps)?);
    }

    let mut stage2_step_sizes = BTreeMap::new();
    if let Some(value) = obj.get("stage2_step_sizes") {
        let map = as_object(value, "stage2_step_sizes")?;
        for (name, entry) in map {
            let path = format!("stage2_step_sizes.{name}");
            let kind = algorithm(name, &path)?;
            let mu = number(entry, &path)?;
            if mu <= 0.0 {
                return err(format!("'{path}' must be positive"));
            }
            stage2_step_sizes.insert(kind, mu);
        }
    }

    let (varest_forgetting, varest_kappa, varest_clip_percentile) = match obj.get("varest") {
        None => (
            DEFAULT_VAREST_FORGETTING,
            DEFAULT_VAREST_KAPPA,
            DEFAULT_VAREST_CLIP_PERCENTILE,
        ),
        Some(value) => {
            let map = as_object(value, "varest")?;
            check_keys(map, VAREST_KEYS, "varest")?;
            let forgetting = match map.get("forgetting") {
                Some(v) => number(v, "varest.forgetting")?,
                None => DEFAULT_VAREST_FORGETTING,
            };
            let kappa = match map.get("kappa") {
                Some(v) => number(v, "varest.kappa")?,
                None => DEFAULT_VAREST_KAPPA,
            };
            // Absent keeps the benchmark default; an explicit null turns
            // the guard off.
            let clip = match map.get("clip_percentile") {
                None => DEFAULT_VAREST_CLIP_PERCENTILE,
                Some(Value::Null) => None,
                Some(v) => Some(number(v, "varest.clip_percentile")?),
            };
            (forgetting, kappa, clip)
        }
    };
    if !(0.0..1.0).contains(&varest_forgetting) {
        return err(format!(
            "'varest.forgetting' must lie in [0, 1), got {varest_forgetting}"
        ));
    }
    if varest_kappa < 0.0 {
        return err(format!("'varest.kappa' must be non-negative, got {varest_kappa}"));
    }
    if let Some(q) = varest_clip_percentile {
        if !q.is_finite() || q <= 0.0 || q >= 100.0 {
            return err(format!(
                "'varest.clip_percentile' must lie in (0, 100) or be null, got {q}"
            ));
        }
    }

    let trials = unsigned(required(obj, "trials", "")?, "trials")? as usize;
    if trials == 0 {
        return err("'trials' must be at least 1");
    }

    let iterations_per_stage = match obj.get("iterations_per_stage") {
        Some(v) => unsigned(v, "iterations_per_stage")? as usize,
        None => 5000,
    };

    let master_seed = match obj.get("master_seed") {
        Some(v) => Some(unsigned(v, "master_seed")?),
        None => None,
    };

    let output_dir = match obj.get("output_dir") {
        Some(v) => PathBuf::from(string(v, "output_dir")?),
        None => PathBuf::from("."),
    };

    let plot = match obj.get("plot") {
        Some(v) => boolean(v, "plot")?,
        None => false,
    };

    let workers = match obj.get("workers") {
        Some(v) => unsigned(v, "workers")? as usize,
        None => 0,
    };

    let variance_mode = match obj.get("variance_mode") {
        None => VarianceMode::Estimated,
        Some(v) => match string(v, "variance_mode")? {
            "estimated" => VarianceMode::Estimated,
            "oracle" => VarianceMode::Oracle,
            other => {
                return err(format!(
                    "'variance_mode': expected 'estimated' or 'oracle', got '{other}'"
                ))
            }
        },
    };

    let compensation = match obj.get("compensation") {
        None => CompensationMode::Observed,
        Some(v) => match string(v, "compensation")? {
            "observed" => CompensationMode::Observed,
            "oracle" => CompensationMode::Oracle,
            other => {
                return err(format!(
                    "'compensation': expected 'observed' or 'oracle', got '{other}'"
                ))
            }
        },
    };

    // Every algorithm the scenario will touch needs a filter entry; the
    // sweep and matched-pair protocols always run the mcc/bcnmcc pair.
    for kind in effective_algorithms(scenario, &algorithms) {
        if !filters.contains_key(&kind) {
            return err(format!(
                "missing filter configuration 'filters.{}' required by scenario '{scenario}'",
                kind.name()
            ));
        }
    }

    Ok(ExperimentConfig {
        scenario,
        algorithms,
        model,
        filters,
        stage2_step_sizes,
        varest_forgetting,
        varest_kappa,
        varest_clip_percentile,
        trials,
        iterations_per_stage,
        master_seed,
        output_dir,
        plot,
        workers,
        variance_mode,
        compensation,
    })
}

/// Read and validate a configuration file.
pub fn parse_config_file(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("cannot read '{}': {e}", path.display())))?;
    parse_config_text(&text)
}

/// Algorithms a scenario actually runs: the configured list for the
/// stage-switch and custom protocols, always the mcc/bcnmcc pair for
/// the sweeps and the matched-pair comparison.
fn effective_algorithms(
    scenario: Scenario,
    configured: &[AlgorithmKind],
) -> Vec<AlgorithmKind> {
    match scenario {
        Scenario::StageSwitch | Scenario::Custom => configured.to_vec(),
        _ => vec![AlgorithmKind::Mcc, AlgorithmKind::Bcnmcc],
    }
}

impl ExperimentConfig {
    /// The algorithms this configuration's scenario will actually run.
    pub fn effective_algorithms(&self) -> Vec<AlgorithmKind> {
        effective_algorithms(self.scenario, &self.algorithms)
    }

    /// Fingerprint of every result-determining field (the effective seed
    /// included; output paths, plot toggle, and worker count excluded —
    /// they never change the numbers).
    pub fn fingerprint(&self, master_seed: u64) -> String {
        let mut canon = String::new();
        canon.push_str(&format!("scenario={};", self.scenario));
        canon.push_str("algorithms=");
        for a in &self.algorithms {
            canon.push_str(a.name());
            canon.push(',');
        }
        canon.push(';');
        let w: Vec<String> = self
            .model
            .true_weights()
            .as_slice()
            .iter()
            .map(|x| format!("{x:?}"))
            .collect();
        canon.push_str(&format!("weights=[{}];", w.join(",")));
        canon.push_str(&format!(
            "input=({:?},{:?});eta={:?};",
            self.model.input().mean(),
            self.model.input().variance(),
            self.model.input_noise_variance()
        ));
        match self.model.output_noise() {
            OutputNoiseLaw::Noiseless => canon.push_str("noise=none;"),
            OutputNoiseLaw::AlphaStable(p) => canon.push_str(&format!(
                "noise=({:?},{:?},{:?},{:?});",
                p.alpha(),
                p.beta(),
                p.gamma(),
                p.theta()
            )),
        }
        for (kind, cfg) in &self.filters {
            canon.push_str(&format!(
                "filter.{}=({:?},{:?},{:?});",
                kind.name(),
                cfg.step_size(),
                cfg.kernel_bandwidth(),
                cfg.regularization()
            ));
        }
        for (kind, mu) in &self.stage2_step_sizes {
            canon.push_str(&format!("stage2.{}={mu:?};", kind.name()));
        }
        canon.push_str(&format!(
            "varest=({:?},{:?},{:?});trials={};iters={};seed={master_seed};modes=({:?},{:?});",
            self.varest_forgetting,
            self.varest_kappa,
            self.varest_clip_percentile,
            self.trials,
            self.iterations_per_stage,
            self.variance_mode,
            self.compensation
        ));
        let digest = Sha256::digest(canon.as_bytes());
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        hex[..16].to_string()
    }

    /// Lower the configuration into the library's experiment
    /// description under the given effective seed.
    pub fn to_spec(&self, master_seed: u64) -> ExperimentSpec {
        ExperimentSpec {
            model: self.model.clone(),
            algorithms: self.algorithms.clone(),
            filters: self.filters.clone(),
            stage2_step_sizes: self.stage2_step_sizes.clone(),
            varest_forgetting: self.varest_forgetting,
            varest_kappa: self.varest_kappa,
            varest_clip_percentile: self.varest_clip_percentile,
            trials: self.trials,
            iterations_per_stage: self.iterations_per_stage,
            master_seed,
            workers: self.workers,
            variance_mode: self.variance_mode,
            compensation: self.compensation,
            config_hash: self.fingerprint(master_seed),
        }
    }
}
