use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use qtemporal_cli::{list_presets, output_paths, run, write_outputs, Experiment, ExperimentConfig, OutputFormat, OUT_DIR_ENV};

#[derive(Parser)]
#[command(name = "qtemporal", version, about = "Temporal Hardy and CHSH experiments on a simulated qubit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hardy value of sequential measurements.
    Hardy(RunArgs),
    /// CHSH value of sequential measurements.
    Chsh(RunArgs),
    /// CHSH preset over random single-qubit states.
    StateScan(RunArgs),
    /// Largest spatial Hardy value over two-qubit states.
    HardySpatialMax(RunArgs),
    /// Coincidence operator and success probability of the PPBS gate.
    PpbsCheck(RunArgs),
    /// Predictions from a depolarized CZ process matrix.
    ProcessPredict(RunArgs),
    /// Resampled counting statistics.
    Montecarlo(RunArgs),
    /// List state and scheme presets.
    Presets,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Structured,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (TOML).
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Overrides sampling.seed.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Output file of the selected format; the other format is written alongside.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

fn execute(experiment: Experiment, args: RunArgs) -> anyhow::Result<()> {
    let config = match &args.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    let format = match args.format {
        Some(FormatArg::Csv) => OutputFormat::Csv,
        Some(FormatArg::Structured) => OutputFormat::Structured,
        None => config.output.format.unwrap_or_default(),
    };
    let explicit = args.out.clone().or_else(|| config.output.path.clone());
    let out_dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
    let paths = output_paths(experiment, explicit.as_deref(), format, out_dir.as_deref());

    let report = run(experiment, &config, args.seed)?;
    write_outputs(&report, &paths)
        .with_context(|| format!("cannot write {} / {}", paths.csv.display(), paths.json.display()))?;
    println!(
        "{experiment}: {} rows, {} above bound -> {}, {}",
        report.rows.len(),
        report.violations(),
        paths.csv.display(),
        paths.json.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, args) = match cli.command {
        Command::Presets => {
            print!("{}", list_presets());
            return ExitCode::SUCCESS;
        }
        Command::Hardy(a) => (Experiment::Hardy, a),
        Command::Chsh(a) => (Experiment::Chsh, a),
        Command::StateScan(a) => (Experiment::StateScan, a),
        Command::HardySpatialMax(a) => (Experiment::HardySpatialMax, a),
        Command::PpbsCheck(a) => (Experiment::PpbsCheck, a),
        Command::ProcessPredict(a) => (Experiment::ProcessPredict, a),
        Command::Montecarlo(a) => (Experiment::Montecarlo, a),
    };
    match execute(experiment, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
