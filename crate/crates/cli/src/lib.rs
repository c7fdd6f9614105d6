//! Batch runner for the qtemporal experiments.
//!
//! Each experiment reads an optional TOML config, runs to completion and
//! writes a CSV table plus a JSON report. The CSV body depends only on the
//! config and seed; timing lives in the JSON metadata.

pub mod config;
pub mod report;
pub mod runner;

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use qtemporal::qcore::{Observable, PolarizationState};

pub use config::{ConfigError, Experiment, ExperimentConfig, OutputFormat};
pub use report::{format_sig, Report, Row, CSV_HEADER};
pub use runner::{run, RunError};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "QTEMPORAL_OUT_DIR";

fn axis_name(o: &Observable) -> String {
    let v = o.bloch();
    let named = [("X", 0), ("Y", 1), ("Z", 2)];
    for (name, i) in named {
        if (v[i].abs() - 1.0).abs() < 1e-12 {
            return if v[i] > 0.0 { name.into() } else { format!("-{name}") };
        }
    }
    format!("({:.4}, {:.4}, {:.4})", v[0], v[1], v[2])
}

fn state_description(s: &PolarizationState) -> String {
    match s {
        PolarizationState::H => "|H> = |0>".into(),
        PolarizationState::V => "|V> = |1>".into(),
        PolarizationState::D => "(|H> + |V>)/sqrt2".into(),
        PolarizationState::A => "(|H> - |V>)/sqrt2".into(),
        PolarizationState::L => "(|H> + i|V>)/sqrt2".into(),
        PolarizationState::R => "(|H> - i|V>)/sqrt2".into(),
        PolarizationState::Mixed(w) => format!("{w} |H><H| + {:.2} |V><V|", 1.0 - w),
        PolarizationState::MaximallyMixed => "I/2".into(),
    }
}

/// Plain-text table of the state and scheme presets.
pub fn list_presets() -> String {
    let mut out = String::from("states\n");
    for s in PolarizationState::STANDARD_SET {
        let _ = writeln!(out, "  {:<17}{}", s.name(), state_description(&s));
    }
    out.push_str("  (any mixed:w with 0 <= w <= 1 is accepted)\n\nschemes\n");
    for name in config::SCHEME_PRESETS {
        let sc = config::preset_scheme(name).expect("preset exists");
        let m = &sc.scheme;
        let q = match sc.quantity {
            config::QuantityKind::S => "S, bound 2",
            config::QuantityKind::H => "H, bound 0",
        };
        let _ = writeln!(
            out,
            "  {:<17}a0={} a1={} b0={} b1={}  [{q}]",
            name,
            axis_name(&m.a0),
            axis_name(&m.a1),
            axis_name(&m.b0),
            axis_name(&m.b1),
        );
    }
    out
}

/// Where the CSV and JSON files go.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputPaths {
    pub csv: PathBuf,
    pub json: PathBuf,
}

/// Resolves output paths. The explicit path (flag, then config) names the
/// file of the selected format; the other file sits next to it. Without an
/// explicit path both go to `out_dir` (or the working directory) named after
/// the experiment.
pub fn output_paths(
    experiment: Experiment,
    explicit: Option<&Path>,
    format: OutputFormat,
    out_dir: Option<&Path>,
) -> OutputPaths {
    let primary = match explicit {
        Some(p) => p.to_path_buf(),
        None => out_dir
            .unwrap_or(Path::new("."))
            .join(format!("{}.{}", experiment.name(), format.extension())),
    };
    let other_ext = match format {
        OutputFormat::Csv => OutputFormat::Structured.extension(),
        OutputFormat::Structured => OutputFormat::Csv.extension(),
    };
    let mut secondary = primary.with_extension(other_ext);
    if secondary == primary {
        let mut s = primary.clone().into_os_string();
        s.push(format!(".{other_ext}"));
        secondary = s.into();
    }
    match format {
        OutputFormat::Csv => OutputPaths {
            csv: primary,
            json: secondary,
        },
        OutputFormat::Structured => OutputPaths {
            csv: secondary,
            json: primary,
        },
    }
}

pub fn write_outputs(report: &Report, paths: &OutputPaths) -> io::Result<()> {
    for p in [&paths.csv, &paths.json] {
        if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
    }
    fs::write(&paths.csv, report.to_csv())?;
    fs::write(&paths.json, report.to_json() + "\n")
}
