//! Standalone SVG rendering of deviation curves and sweep summaries.
//! No external renderer: the files are plain SVG 1.1 with polylines,
//! circles, and text, so tests can assert on their structure directly.

use corrfilt::{AlgorithmKind, Scenario, ScenarioResult};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

#[derive(Debug)]
pub enum PlotError {
    /// Nothing to draw; no file is created.
    Empty,
    Io(io::Error),
}

impl std::fmt::Display for PlotError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PlotError::Empty => f.write_str("no curves to plot"),
            PlotError::Io(e) => write!(f, "cannot write plot: {e}"),
        }
    }
}

impl std::error::Error for PlotError {}

const WIDTH: f64 = 960.0;
const HEIGHT: f64 = 600.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 750.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 540.0;
/// Cap on points per polyline; longer curves are strided down.
const MAX_POINTS: usize = 1500;

/// One fixed color per algorithm so every plot reads the same way.
fn color(algorithm: AlgorithmKind) -> &'static str {
    match algorithm {
        AlgorithmKind::Lms => "#1f77b4",
        AlgorithmKind::Nlms => "#ff7f0e",
        AlgorithmKind::Mcc => "#2ca02c",
        AlgorithmKind::Nmcc => "#d62728",
        AlgorithmKind::Bcnlms => "#9467bd",
        AlgorithmKind::Bcnmcc => "#8c564b",
    }
}

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        LEFT + (v - self.x_min) / (self.x_max - self.x_min) * (RIGHT - LEFT)
    }

    fn y(&self, v: f64) -> f64 {
        BOTTOM - (v - self.y_min) / (self.y_max - self.y_min) * (BOTTOM - TOP)
    }
}

/// Padded integer y-range covering all finite values.
fn y_frame(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (-1.0, 1.0);
    }
    let pad = ((hi - lo) * 0.05).max(0.5);
    ((lo - pad).floor(), (hi + pad).ceil())
}

fn open_svg(title: &str) -> String {
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="16">{title}</text>"#,
        (LEFT + RIGHT) / 2.0
    );
    svg
}

fn axes(svg: &mut String, frame: &Frame, x_label: &str, y_label: &str, x_ticks: &[f64]) {
    // y grid and tick labels: six evenly spaced lines.
    for i in 0..=5 {
        let v = frame.y_min + (frame.y_max - frame.y_min) * i as f64 / 5.0;
        let y = frame.y(v);
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{RIGHT}" y2="{y:.2}" stroke="#dddddd"/>"##
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{:.2}" text-anchor="end" font-size="12">{v:.1}</text>"#,
            LEFT - 8.0,
            y + 4.0
        );
    }
    for &v in x_ticks {
        let x = frame.x(v);
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.2}" y1="{BOTTOM}" x2="{x:.2}" y2="{}" stroke="#dddddd"/>"##,
            BOTTOM + 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{}" text-anchor="middle" font-size="12">{v}</text>"#,
            BOTTOM + 20.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        RIGHT - LEFT,
        BOTTOM - TOP
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="13">{x_label}</text>"#,
        (LEFT + RIGHT) / 2.0,
        BOTTOM + 45.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{}" text-anchor="middle" font-size="13" transform="rotate(-90 18 {})">{y_label}</text>"#,
        (TOP + BOTTOM) / 2.0,
        (TOP + BOTTOM) / 2.0
    );
}

fn legend(svg: &mut String, entries: &[(AlgorithmKind, String)]) {
    for (i, (algorithm, label)) in entries.iter().enumerate() {
        let y = TOP + 16.0 + i as f64 * 20.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="{}" stroke-width="2"/>"#,
            RIGHT + 14.0,
            RIGHT + 40.0,
            color(*algorithm)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{:.2}" font-size="12">{label}</text>"#,
            RIGHT + 46.0,
            y + 4.0
        );
    }
}

/// Deviation curves against iteration count, with dashed vertical
/// markers at stage boundaries.
fn curve_plot(
    result: &ScenarioResult,
    legends: &BTreeMap<AlgorithmKind, String>,
) -> String {
    let set = &result.curve_sets[0];
    let length = set.curves.iter().map(|c| c.values_db.len()).max().unwrap();
    let frame = Frame {
        x_min: 0.0,
        x_max: (length - 1).max(1) as f64,
        y_min: 0.0,
        y_max: 0.0,
    };
    let (y_min, y_max) = y_frame(set.curves.iter().flat_map(|c| c.values_db.iter().copied()));
    let frame = Frame { y_min, y_max, ..frame };

    let mut svg = open_svg(result.scenario.name());
    let x_ticks: Vec<f64> = (0..=5).map(|i| (length - 1) as f64 * i as f64 / 5.0).collect();
    let x_ticks: Vec<f64> = x_ticks.iter().map(|v| v.round()).collect();
    axes(&mut svg, &frame, "iteration", "MSD (dB)", &x_ticks);

    for &boundary in &set.stage_boundaries {
        let x = frame.x(boundary as f64);
        let _ = writeln!(
            svg,
            r##"<line class="stage-marker" x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{BOTTOM}" stroke="#888888" stroke-dasharray="6 4"/>"##
        );
    }

    for curve in &set.curves {
        let stride = curve.values_db.len().div_ceil(MAX_POINTS).max(1);
        let mut points = String::new();
        for (i, v) in curve.values_db.iter().enumerate() {
            if i % stride == 0 || i == curve.values_db.len() - 1 {
                let _ = write!(points, "{:.2},{:.2} ", frame.x(i as f64), frame.y(*v));
            }
        }
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            color(curve.algorithm),
            points.trim_end()
        );
    }

    let entries: Vec<(AlgorithmKind, String)> = set
        .curves
        .iter()
        .map(|c| {
            let annotation = legends.get(&c.algorithm).cloned().unwrap_or_default();
            (c.algorithm, format!("{} {annotation}", c.algorithm.name()))
        })
        .collect();
    legend(&mut svg, &entries);
    svg.push_str("</svg>\n");
    svg
}

/// Steady state against the sweep axis: one scatter-with-line series per
/// algorithm.
fn sweep_plot(
    result: &ScenarioResult,
    legends: &BTreeMap<AlgorithmKind, String>,
) -> String {
    let mut series: BTreeMap<AlgorithmKind, Vec<(f64, f64)>> = BTreeMap::new();
    for row in &result.summary {
        if let Some(x) = row.sweep_value {
            series
                .entry(row.algorithm)
                .or_default()
                .push((x, row.steady_state_db));
        }
    }
    let xs: Vec<f64> = series
        .values()
        .flat_map(|pts| pts.iter().map(|(x, _)| *x))
        .collect();
    let x_min = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let x_max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (y_min, y_max) = y_frame(
        series
            .values()
            .flat_map(|pts| pts.iter().map(|(_, y)| *y)),
    );
    let span = (x_max - x_min).max(1e-9);
    let frame = Frame {
        x_min: x_min - span * 0.05,
        x_max: x_max + span * 0.05,
        y_min,
        y_max,
    };

    let x_label = match result.scenario {
        Scenario::SigmaSweep => "kernel bandwidth",
        Scenario::InputVarianceSweep => "input-noise variance",
        _ => "sweep value",
    };
    let mut svg = open_svg(result.scenario.name());
    let mut x_ticks: Vec<f64> = series.values().next().map_or_else(Vec::new, |pts| {
        pts.iter().map(|(x, _)| *x).collect()
    });
    x_ticks.dedup();
    axes(&mut svg, &frame, x_label, "steady-state MSD (dB)", &x_ticks);

    for (algorithm, points) in &series {
        let path: String = points
            .iter()
            .map(|(x, y)| format!("{:.2},{:.2} ", frame.x(*x), frame.y(*y)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            color(*algorithm),
            path.trim_end()
        );
        for (x, y) in points {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="{}"/>"#,
                frame.x(*x),
                frame.y(*y),
                color(*algorithm)
            );
        }
    }

    let entries: Vec<(AlgorithmKind, String)> = series
        .keys()
        .map(|a| {
            let annotation = legends.get(a).cloned().unwrap_or_default();
            (*a, format!("{} {annotation}", a.name()))
        })
        .collect();
    legend(&mut svg, &entries);
    svg.push_str("</svg>\n");
    svg
}

/// Render the result to `path`. Curve scenarios get an iteration plot;
/// sweeps get a scatter-with-line of steady states. Empty results are an
/// error and create no file.
pub fn write_plot(
    result: &ScenarioResult,
    legends: &BTreeMap<AlgorithmKind, String>,
    path: &Path,
) -> Result<(), PlotError> {
    let has_curve_points = result
        .curve_sets
        .first()
        .is_some_and(|s| s.curves.iter().any(|c| !c.values_db.is_empty()));
    if !has_curve_points {
        return Err(PlotError::Empty);
    }
    let svg = if result.curve_sets.len() == 1 {
        curve_plot(result, legends)
    } else {
        sweep_plot(result, legends)
    };
    fs::write(path, svg).map_err(PlotError::Io)
}
