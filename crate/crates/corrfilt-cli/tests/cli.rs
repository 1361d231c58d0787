//! Behavior of the `corrfilt` binary: subcommands, flag precedence,
//! seed resolution, exit codes, and byte-level determinism of the
//! emitted files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn binary() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_corrfilt"));
    // A seed in the environment would change seed-resolution behavior.
    cmd.env_remove("CORRFILT_SEED");
    cmd
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

/// A small, fast experiment: one stage, two rules, a handful of trials.
fn small_config(dir: &Path, extra: &str) -> PathBuf {
    let text = format!(
        r#"{{
            "scenario": "custom",
            "algorithms": ["nmcc", "bcnmcc"],
            "model": {{
                "true_weights": [-0.3, -0.9, 0.8, -0.7, 0.6],
                "input": {{"mean": 1.0, "variance": 1.0}},
                "input_noise_variance": 0.25,
                "output_noise": {{"alpha": 1.8, "beta": 0.0, "gamma": 0.2, "theta": 0.0}}
            }},
            "filters": {{
                "nmcc": {{"step_size": 0.5, "sigma": 4.0, "epsilon": 0.001}},
                "bcnmcc": {{"step_size": 0.070056, "sigma": 4.0, "epsilon": 0.001}}
            }},
            "trials": 4,
            "iterations_per_stage": 100,
            "output_dir": "{}"
            {extra}
        }}"#,
        dir.join("out").display()
    );
    let path = dir.join("config.json");
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn scenarios_subcommand_lists_the_builtins() {
    let output = binary().arg("scenarios").output().unwrap();
    assert_eq!(output.status.code(), Some(0));
    let text = stdout(&output);
    for name in [
        "stage-switch",
        "matched-pair",
        "sigma-sweep",
        "input-variance-sweep",
    ] {
        assert!(text.contains(name), "missing '{name}' in:\n{text}");
    }
}

#[test]
fn validate_accepts_good_config_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_config(dir.path(), ", \"master_seed\": 1");
    let output = binary()
        .args(["validate", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    assert!(stdout(&output).contains("ok:"));
    assert!(
        !dir.path().join("out").exists(),
        "validate must not create output files"
    );
}

#[test]
fn validate_rejects_unknown_key_with_suggestion() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_config(dir.path(), ", \"master_seed\": 1");
    let text = fs::read_to_string(&config)
        .unwrap()
        .replace("\"sigma\"", "\"sigm\"");
    fs::write(&config, text).unwrap();
    let output = binary()
        .args(["validate", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let text = stderr(&output);
    assert!(text.contains("sigm"), "{text}");
    assert!(text.contains("did you mean 'sigma'?"), "{text}");
}

#[test]
fn validate_checks_the_variance_guard_percentile() {
    let dir = tempfile::tempdir().unwrap();
    let off = small_config(
        dir.path(),
        ", \"master_seed\": 1, \"varest\": {\"clip_percentile\": null}",
    );
    let output = binary()
        .args(["validate", "--config"])
        .arg(&off)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));

    let bad = small_config(
        dir.path(),
        ", \"master_seed\": 1, \"varest\": {\"clip_percentile\": 100.0}",
    );
    let output = binary()
        .args(["validate", "--config"])
        .arg(&bad)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let text = stderr(&output);
    assert!(text.contains("clip_percentile"), "{text}");
    assert!(text.contains("(0, 100)"), "{text}");
}

#[test]
fn unknown_flag_prints_usage_and_exits_one() {
    let output = binary()
        .args(["run", "--confg", "x.json"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let text = stderr(&output);
    assert!(text.contains("Usage"), "{text}");
}

#[test]
fn help_exits_zero() {
    let output = binary().arg("--help").output().unwrap();
    assert_eq!(output.status.code(), Some(0));
    assert!(stdout(&output).contains("Usage"));
}

#[test]
fn missing_config_file_exits_one() {
    let output = binary()
        .args(["run", "--config", "/nonexistent/nope.json"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr(&output).contains("cannot read"));
}

#[test]
fn zero_trials_override_is_rejected_by_name() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_config(dir.path(), ", \"master_seed\": 1");
    let output = binary()
        .args(["run", "--trials", "0", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr(&output).contains("trials"), "{}", stderr(&output));
}

#[test]
fn run_without_any_seed_exits_one_naming_the_options() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_config(dir.path(), "");
    let output = binary()
        .args(["run", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let text = stderr(&output);
    assert!(text.contains("master_seed"), "{text}");
    assert!(text.contains("--seed"), "{text}");
    assert!(text.contains("CORRFILT_SEED"), "{text}");
}

fn run_into(config: &Path, out: &Path, extra_args: &[&str]) -> Output {
    let mut cmd = binary();
    cmd.args(["run", "--config"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(extra_args);
    cmd.output().unwrap()
}

#[test]
fn reruns_are_byte_identical_and_seed_changes_them() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_config(dir.path(), ", \"master_seed\": 42");
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    assert_eq!(run_into(&config, &a, &[]).status.code(), Some(0));
    assert_eq!(run_into(&config, &b, &[]).status.code(), Some(0));
    assert_eq!(
        run_into(&config, &c, &["--seed", "43"]).status.code(),
        Some(0)
    );
    let read = |d: &Path| fs::read(d.join("curves.csv")).unwrap();
    assert_eq!(read(&a), read(&b), "same seed must reproduce bytes");
    assert_ne!(read(&a), read(&c), "a different seed must change results");
}

#[test]
fn seed_flag_overrides_config_and_env_is_the_fallback() {
    let dir = tempfile::tempdir().unwrap();
    let with_seed = small_config(dir.path(), ", \"master_seed\": 42");
    let a = dir.path().join("a");
    assert_eq!(run_into(&with_seed, &a, &[]).status.code(), Some(0));

    // Flag beats a conflicting config seed.
    let sub = tempfile::tempdir().unwrap();
    let conflicting = small_config(sub.path(), ", \"master_seed\": 999");
    let b = sub.path().join("b");
    assert_eq!(
        run_into(&conflicting, &b, &["--seed", "42"]).status.code(),
        Some(0)
    );

    // Environment fills in when the config has no seed.
    let env_dir = tempfile::tempdir().unwrap();
    let seedless = small_config(env_dir.path(), "");
    let c = env_dir.path().join("c");
    let output = binary()
        .args(["run", "--config"])
        .arg(&seedless)
        .arg("--out")
        .arg(&c)
        .env("CORRFILT_SEED", "42")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));

    let read = |d: &Path| fs::read(d.join("curves.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_eq!(read(&a), read(&c));
}

#[test]
fn invalid_env_seed_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_config(dir.path(), "");
    let output = binary()
        .args(["run", "--config"])
        .arg(&config)
        .env("CORRFILT_SEED", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr(&output).contains("CORRFILT_SEED"));
}

#[test]
fn plot_flag_writes_svg_with_expected_structure() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_config(dir.path(), ", \"master_seed\": 7");
    let out = dir.path().join("out");
    let output = run_into(&config, &out, &["--plot"]);
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    let svg = fs::read_to_string(out.join("plot.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 2, "one polyline per rule");
    assert!(svg.contains("MSD (dB)"));
    assert!(svg.contains("iteration"));
    // Legend carries the rule names and their step sizes.
    assert!(svg.contains("nmcc mu=0.5"), "{svg}");
}

#[test]
fn run_reports_files_and_summary_table() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_config(dir.path(), ", \"master_seed\": 7");
    let out = dir.path().join("out");
    let output = run_into(&config, &out, &[]);
    assert_eq!(output.status.code(), Some(0));
    let text = stdout(&output);
    assert!(text.contains("steady state"), "{text}");
    assert!(text.contains("curves.csv"), "{text}");
    assert!(text.contains("summary.csv"), "{text}");
    assert!(!out.join("plot.svg").exists(), "plot is opt-in");

    let csv = fs::read_to_string(out.join("curves.csv")).unwrap();
    let mut lines = csv.lines();
    let comment = lines.next().unwrap();
    assert!(comment.starts_with("# corrfilt"), "{comment}");
    assert!(comment.contains("seed=7"), "{comment}");
    assert!(comment.contains("config="), "{comment}");
    assert_eq!(lines.next().unwrap(), "iteration,nmcc,bcnmcc");
    // 100 iterations -> 100 data rows after comment and header.
    assert_eq!(csv.lines().count(), 102);
}
