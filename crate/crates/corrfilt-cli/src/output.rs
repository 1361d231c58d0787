//! CSV emission: one curve file and one steady-state summary per run,
//! each headed by a provenance comment line. Output is deterministic
//! byte-for-byte for a given configuration and seed.

use corrfilt::{Scenario, ScenarioResult, SummaryRow};
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

/// Render with six significant digits in plain decimal notation
/// (`-13.1284`, `0.00123456`, `320.000`).
pub fn six_digits(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = (5 - exponent).clamp(0, 17) as usize;
    format!("{x:.decimals$}")
}

fn comment_line(result: &ScenarioResult) -> String {
    format!(
        "# corrfilt {} seed={} config={} generator={}\n",
        env!("CARGO_PKG_VERSION"),
        result.metadata.master_seed,
        result.metadata.config_hash,
        result.metadata.generator
    )
}

/// Column header for one curve: the bare algorithm name when the run has
/// a single parameter point, `<algorithm>@<point>` within a sweep.
fn column_name(set_label: &str, algorithm: &str, sweep: bool) -> String {
    if sweep {
        format!("{algorithm}@{set_label}")
    } else {
        algorithm.to_string()
    }
}

/// Write the per-iteration deviation curves of every set as one CSV:
/// `iteration,<col>,...` after the provenance comment.
pub fn write_curves(result: &ScenarioResult, path: &Path) -> io::Result<()> {
    let sweep = result.curve_sets.len() > 1;
    let mut columns = Vec::new();
    let mut length = 0;
    for set in &result.curve_sets {
        for curve in &set.curves {
            columns.push((
                column_name(&set.label, curve.algorithm.name(), sweep),
                &curve.values_db,
            ));
            length = length.max(curve.values_db.len());
        }
    }

    let mut text = comment_line(result);
    text.push_str("iteration");
    for (name, _) in &columns {
        text.push(',');
        text.push_str(name);
    }
    text.push('\n');
    for i in 0..length {
        let _ = write!(text, "{i}");
        for (_, values) in &columns {
            text.push(',');
            if let Some(v) = values.get(i) {
                text.push_str(&six_digits(*v));
            }
        }
        text.push('\n');
    }
    fs::write(path, text)
}

/// Name of the first summary column: the sweep axis when there is one,
/// otherwise a constant point label.
fn axis_name(scenario: Scenario) -> &'static str {
    match scenario {
        Scenario::SigmaSweep => "sigma",
        Scenario::InputVarianceSweep => "input_variance",
        _ => "point",
    }
}

/// Write the steady-state summary: one row per parameter point, one
/// column per algorithm.
pub fn write_summary(result: &ScenarioResult, path: &Path) -> io::Result<()> {
    // Group the flat row list by point label, preserving encounter order.
    let mut points: Vec<(&str, Vec<&SummaryRow>)> = Vec::new();
    for row in &result.summary {
        match points.last_mut() {
            Some((label, rows)) if *label == row.label => rows.push(row),
            _ => points.push((&row.label, vec![row])),
        }
    }

    let mut text = comment_line(result);
    text.push_str(axis_name(result.scenario));
    if let Some((_, rows)) = points.first() {
        for row in rows {
            text.push(',');
            text.push_str(row.algorithm.name());
        }
    }
    text.push('\n');
    for (label, rows) in &points {
        match rows[0].sweep_value {
            Some(value) => {
                let _ = write!(text, "{value}");
            }
            None => text.push_str(label),
        }
        for row in rows {
            text.push(',');
            text.push_str(&six_digits(row.steady_state_db));
        }
        text.push('\n');
    }
    fs::write(path, text)
}

/// Human-readable steady-state table for standard output.
pub fn render_summary_table(result: &ScenarioResult) -> String {
    let mut text = String::new();
    let _ = writeln!(
        text,
        "{:<22} {:<8} {:>14}",
        axis_name(result.scenario),
        "rule",
        "steady state"
    );
    for row in &result.summary {
        let _ = writeln!(
            text,
            "{:<22} {:<8} {:>11} dB",
            row.label,
            row.algorithm.name(),
            six_digits(row.steady_state_db)
        );
    }
    text
}

/// The file paths a run writes into its output directory.
pub struct OutputPaths {
    pub curves: PathBuf,
    pub summary: PathBuf,
    pub plot: PathBuf,
}

impl OutputPaths {
    pub fn new(dir: &Path) -> Self {
        Self {
            curves: dir.join("curves.csv"),
            summary: dir.join("summary.csv"),
            plot: dir.join("plot.svg"),
        }
    }
}
