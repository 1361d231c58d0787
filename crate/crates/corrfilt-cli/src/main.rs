//! `corrfilt` — Monte-Carlo benchmark driver for the adaptive-filter
//! library: runs the built-in system-identification scenarios from a
//! JSON config and emits CSV curves, a steady-state summary, and
//! optional SVG plots.
//!
//! Exit codes: 0 success, 1 configuration/usage error, 2 runtime
//! failure. This layer is single-threaded; trial parallelism lives in
//! the library and never changes the emitted bytes.

mod config;
mod output;
mod plot;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use config::{parse_config_file, ExperimentConfig};
use corrfilt::{AlgorithmKind, Scenario};
use output::OutputPaths;
use std::collections::BTreeMap;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "corrfilt",
    version,
    about = "Adaptive-filter benchmark: LMS/NLMS/MCC/NMCC and bias-compensated variants under impulsive noise"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario from a config file and write CSV results.
    Run {
        /// Path to the JSON experiment config.
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides the config's `output_dir`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Master seed (overrides the config's `master_seed`).
        #[arg(long)]
        seed: Option<u64>,
        /// Monte-Carlo trial count (overrides the config's `trials`).
        #[arg(long)]
        trials: Option<usize>,
        /// Worker threads; 0 means one per core (overrides `workers`).
        #[arg(long)]
        workers: Option<usize>,
        /// Also write an SVG plot of the results.
        #[arg(long)]
        plot: bool,
    },
    /// List the built-in scenarios.
    Scenarios,
    /// Parse and validate a config file without running or writing anything.
    Validate {
        /// Path to the JSON experiment config.
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() {
    std::process::exit(run_cli());
}

fn run_cli() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version are successful exits; everything else
            // (unknown flag, missing value) prints usage and fails.
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };

    match cli.command {
        Command::Scenarios => {
            for scenario in Scenario::BUILT_IN {
                println!("{:<22} {}", scenario.name(), scenario.description());
            }
            0
        }
        Command::Validate { config } => match parse_config_file(&config) {
            Ok(cfg) => {
                println!(
                    "ok: scenario '{}', {} algorithm(s), {} trial(s), {} iteration(s) per stage",
                    cfg.scenario,
                    cfg.effective_algorithms().len(),
                    cfg.trials,
                    cfg.iterations_per_stage
                );
                0
            }
            Err(e) => {
                eprintln!("error: {e}");
                1
            }
        },
        Command::Run {
            config,
            out,
            seed,
            trials,
            workers,
            plot,
        } => run_command(&config, out, seed, trials, workers, plot),
    }
}

/// Seed fallback from the environment, used when neither the flag nor
/// the config provides one.
fn env_seed() -> Result<Option<u64>, String> {
    match std::env::var("CORRFILT_SEED") {
        Ok(text) => text
            .trim()
            .parse::<u64>()
            .map(Some)
            .map_err(|_| format!("CORRFILT_SEED must be a non-negative integer, got '{text}'")),
        Err(_) => Ok(None),
    }
}

/// Legend annotation per algorithm: the step size, with the second-stage
/// override appended when the matched-pair protocol swaps it in.
fn legend_annotations(cfg: &ExperimentConfig) -> BTreeMap<AlgorithmKind, String> {
    let mut legends = BTreeMap::new();
    for (&algorithm, filter) in &cfg.filters {
        let label = match (cfg.scenario, cfg.stage2_step_sizes.get(&algorithm)) {
            (Scenario::MatchedPair, Some(mu2)) => {
                format!("mu={}/{}", filter.step_size(), mu2)
            }
            _ => format!("mu={}", filter.step_size()),
        };
        legends.insert(algorithm, label);
    }
    legends
}

fn run_command(
    config_path: &PathBuf,
    out: Option<PathBuf>,
    seed: Option<u64>,
    trials: Option<usize>,
    workers: Option<usize>,
    plot: bool,
) -> i32 {
    let mut cfg = match parse_config_file(config_path) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };

    // Command-line flags override config fields.
    if let Some(trials) = trials {
        if trials == 0 {
            eprintln!("error: 'trials' must be at least 1");
            return 1;
        }
        cfg.trials = trials;
    }
    if let Some(workers) = workers {
        cfg.workers = workers;
    }
    if let Some(out) = out {
        cfg.output_dir = out;
    }
    if plot {
        cfg.plot = true;
    }

    let seed = match seed.or(cfg.master_seed) {
        Some(seed) => seed,
        None => match env_seed() {
            Ok(Some(seed)) => seed,
            Ok(None) => {
                eprintln!(
                    "error: no seed: set 'master_seed' in the config, pass --seed, \
                     or export CORRFILT_SEED"
                );
                return 1;
            }
            Err(message) => {
                eprintln!("error: {message}");
                return 1;
            }
        },
    };

    let spec = cfg.to_spec(seed);
    let result = match corrfilt::run_scenario(cfg.scenario, &spec) {
        Ok(result) => result,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };

    if let Err(e) = std::fs::create_dir_all(&cfg.output_dir) {
        eprintln!(
            "error: cannot create output directory '{}': {e}",
            cfg.output_dir.display()
        );
        return 2;
    }
    let paths = OutputPaths::new(&cfg.output_dir);
    if let Err(e) = output::write_curves(&result, &paths.curves) {
        eprintln!("error: cannot write '{}': {e}", paths.curves.display());
        return 2;
    }
    if let Err(e) = output::write_summary(&result, &paths.summary) {
        eprintln!("error: cannot write '{}': {e}", paths.summary.display());
        return 2;
    }
    if cfg.plot {
        let legends = legend_annotations(&cfg);
        if let Err(e) = plot::write_plot(&result, &legends, &paths.plot) {
            eprintln!("error: {e}");
            return 2;
        }
    }

    print!("{}", output::render_summary_table(&result));
    println!("wrote {}", paths.curves.display());
    println!("wrote {}", paths.summary.display());
    if cfg.plot {
        println!("wrote {}", paths.plot.display());
    }
    0
}
