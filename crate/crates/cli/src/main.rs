mod config;
mod manifest;
mod stages;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tennis_core::models::ModelKind;

use config::RunConfig;
use stages::{CliError, Stage};

#[derive(Parser)]
#[command(name = "tennis", version, about = "Tennis match prediction pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Match results file (repeatable).
    #[arg(long, global = true)]
    matches: Vec<PathBuf>,
    /// Bookmaker odds file (repeatable).
    #[arg(long, global = true)]
    odds: Vec<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    folds: Option<usize>,
    #[arg(long, global = true, value_enum)]
    model: Option<ModelArg>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Stage input, overriding the previous stage's output in the output directory.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Worker threads (0: all cores). Results do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Parse match and odds files, merge them, write merged.csv and quality_report.json.
    Ingest,
    /// Compute per-entry features from merged.csv into features.csv.
    Featurize,
    /// Fit each configured model on all entries.
    Train,
    /// k-fold cross-validated accuracy and score of each model.
    Evaluate,
    /// Wrapper feature selection for each model.
    Select,
    /// Models trained on odds-absent entries against odds on odds-present entries.
    CompareOdds,
    /// Summarize the stage outputs present in the output directory as report.md.
    Report,
}

#[derive(ValueEnum, Clone, Copy)]
enum ModelArg {
    Forest,
    Logistic,
    Svm,
    All,
}

impl Command {
    fn stage(self) -> Stage {
        match self {
            Command::Ingest => Stage::Ingest,
            Command::Featurize => Stage::Featurize,
            Command::Train => Stage::Train,
            Command::Evaluate => Stage::Evaluate,
            Command::Select => Stage::Select,
            Command::CompareOdds => Stage::CompareOdds,
            Command::Report => Stage::Report,
        }
    }
}

fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p).map_err(CliError::Usage)?,
        None => RunConfig::default(),
    };
    if !cli.matches.is_empty() {
        cfg.inputs.matches = cli.matches.clone();
    }
    if !cli.odds.is_empty() {
        cfg.inputs.odds = cli.odds.clone();
    }
    if let Some(p) = &cli.input {
        cfg.inputs.input = Some(p.clone());
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(k) = cli.folds {
        cfg.folds = k;
    }
    if let Some(o) = &cli.out {
        cfg.out = o.clone();
    }
    match cli.model {
        Some(ModelArg::Forest) => cfg.models = vec![ModelKind::Forest],
        Some(ModelArg::Logistic) => cfg.models = vec![ModelKind::Logistic],
        Some(ModelArg::Svm) => cfg.models = vec![ModelKind::Svm],
        Some(ModelArg::All) => cfg.models = ModelKind::ALL.to_vec(),
        None => {}
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let stage = cli.command.stage();
    let result = resolve(&cli).and_then(|cfg| {
        if cli.threads > 0 {
            rayon::ThreadPoolBuilder::new()
                .num_threads(cli.threads)
                .build_global()
                .map_err(|e| CliError::Usage(e.to_string()))?;
        }
        stages::run(stage, &cfg)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tennis {}: {}", stage.name(), e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
