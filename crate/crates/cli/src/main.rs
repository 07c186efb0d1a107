use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod config;
mod output;

use config::Config;

#[derive(Parser, Debug)]
#[command(name = "lla", version, about = "Logical layout analysis for XML ALTO documents")]
struct Cli {
    /// TOML configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Random seed; overrides the config file
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// More log output; repeat for debug messages
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Label the blocks and lines of ALTO files
    Annotate(AnnotateArgs),
    /// Write line, block and document feature matrices
    ExtractFeatures(ExtractArgs),
    /// Induce RIPPER rules from a feature table and ground truth
    Train(TrainArgs),
    /// Score prediction files against ground truth
    Evaluate(EvaluateArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Alto,
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct AnnotateArgs {
    /// ALTO files
    #[arg(required = true)]
    inputs: Vec<PathBuf>,

    /// Output directory
    #[arg(short, long)]
    out: PathBuf,

    #[arg(short, long, value_enum, default_value_t = Format::Alto)]
    format: Format,

    /// Use induced rules from this directory (line and block models) instead of the rule file
    #[arg(long)]
    model: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExtractArgs {
    /// ALTO files
    #[arg(required = true)]
    inputs: Vec<PathBuf>,

    /// Output directory
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Line,
    Block,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum BinningArg {
    EqualFrequency,
    EqualWidth,
}

#[derive(Args, Debug)]
struct TrainArgs {
    /// Feature tables with an `element_id` column
    #[arg(long = "features", required = true, num_args = 1..)]
    features: Vec<PathBuf>,

    /// Ground truth CSV: document_id,element_id,kind,label
    #[arg(long)]
    truth: PathBuf,

    /// Element kind of the feature rows
    #[arg(long, value_enum, default_value_t = Kind::Line)]
    kind: Kind,

    /// Label to learn, or `all` for one model per label
    #[arg(long, default_value = "all")]
    label: String,

    /// Search the hyperparameter grid with cross-validation
    #[arg(long)]
    grid: bool,

    /// Folds for the grid search
    #[arg(long, default_value_t = 5)]
    folds: usize,

    #[arg(long, default_value_t = 0.33)]
    prune_size: f64,

    /// Optimization passes
    #[arg(long, default_value_t = 2)]
    k: usize,

    #[arg(long, default_value_t = 64.0)]
    dl_allowance: f64,

    #[arg(long, default_value_t = 10)]
    bins: usize,

    #[arg(long, value_enum, default_value_t = BinningArg::EqualFrequency)]
    binning: BinningArg,

    /// Output directory
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    /// Prediction files (CSV, JSON or JSON lines)
    #[arg(required = true)]
    predictions: Vec<PathBuf>,

    /// Ground truth CSV: document_id,element_id,kind,label
    #[arg(long)]
    truth: PathBuf,

    /// Layout manifest CSV: document_id,layout
    #[arg(long)]
    layouts: Option<PathBuf>,

    /// Model names, one per prediction file (default: file stems)
    #[arg(long = "name")]
    names: Vec<String>,

    /// Also write the report as JSON
    #[arg(long)]
    json: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<bool> {
    let config = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let seed = cli.seed.or(config.seed).unwrap_or(0);
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
            .context("configuring worker threads")?;
    }
    match cli.command {
        Command::Annotate(a) => commands::annotate(&config, &a),
        Command::ExtractFeatures(a) => commands::extract_features(&config, &a),
        Command::Train(a) => commands::train(&a, seed),
        Command::Evaluate(a) => commands::evaluate(&a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(true)) => ExitCode::SUCCESS,
        Ok(Ok(false)) => ExitCode::from(1),
        Ok(Err(e)) => {
            log::error!("{e:#}");
            ExitCode::from(1)
        }
        Err(_) => ExitCode::from(2),
    }
}
