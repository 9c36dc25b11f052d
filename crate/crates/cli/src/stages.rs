//! One function per pipeline stage. Stages communicate only through files in `out`.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use tennis_core::evaluation::{cv_report, odds_protocol, EvaluationReport, ProtocolOptions};
use tennis_core::features::{featurize, Dataset};
use tennis_core::ingest::{
    impute_medians, merge_odds_within, parse_matches, parse_odds, read_merged, write_merged, QualityReport,
};
use tennis_core::models::{save_model, ModelKind, ModelSpec};
use tennis_core::selection::{run_selection, SelectionContext, SelectionTrace};
use tennis_core::Error;

use crate::config::RunConfig;
use crate::manifest::{digests, sha256_bytes, Manifest};

/// Failure of a stage, classified for the process exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Training(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Training(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Training(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_training() {
            CliError::Training(e.to_string())
        } else if matches!(e, Error::InvalidArgument(_)) {
            CliError::Usage(e.to_string())
        } else {
            CliError::Data(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Ingest,
    Featurize,
    Train,
    Evaluate,
    Select,
    CompareOdds,
    Report,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Featurize => "featurize",
            Stage::Train => "train",
            Stage::Evaluate => "evaluate",
            Stage::Select => "select",
            Stage::CompareOdds => "compare-odds",
            Stage::Report => "report",
        }
    }
}

pub const MERGED: &str = "merged.csv";
pub const QUALITY: &str = "quality_report.json";
pub const FEATURES: &str = "features.csv";
pub const MEDIANS: &str = "medians.json";
pub const EVALUATION: &str = "evaluation.json";
pub const ODDS_REPORT: &str = "odds_report.json";
pub const REPORT: &str = "report.md";

struct Outputs {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Outputs {
    fn path(&mut self, name: &str) -> PathBuf {
        let p = self.dir.join(name);
        self.written.push(p.clone());
        p
    }

    fn create(&mut self, name: &str) -> Result<BufWriter<File>> {
        Ok(BufWriter::new(File::create(self.path(name))?))
    }

    fn json<T: serde::Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut w = self.create(name)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(())
    }
}

fn stage_input(cfg: &RunConfig, default: &str) -> Result<PathBuf> {
    let p = cfg.inputs.input.clone().unwrap_or_else(|| cfg.out.join(default));
    if !p.exists() {
        return Err(CliError::Usage(format!("input {} does not exist (run the previous stage or pass --input)", p.display())));
    }
    Ok(p)
}

fn load_dataset(cfg: &RunConfig) -> Result<(Dataset, PathBuf)> {
    let path = stage_input(cfg, FEATURES)?;
    let ds = Dataset::read_csv(BufReader::new(File::open(&path)?))
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    if ds.is_empty() {
        return Err(CliError::Data(format!("{} has no entries", path.display())));
    }
    let ds = if cfg.features.is_empty() { ds } else { ds.select_features(&cfg.features)? };
    Ok((ds, path))
}

fn specs(cfg: &RunConfig) -> Vec<ModelSpec> {
    cfg.models.iter().map(|&k| ModelSpec::new(k, cfg.params.clone())).collect()
}

/// Run `stage`, then echo the resolved configuration and write the manifest.
pub fn run(stage: Stage, cfg: &RunConfig) -> Result<()> {
    cfg.validate().map_err(CliError::Usage)?;
    fs::create_dir_all(&cfg.out)?;
    let mut out = Outputs { dir: cfg.out.clone(), written: vec![] };
    let inputs = match stage {
        Stage::Ingest => ingest(cfg, &mut out)?,
        Stage::Featurize => featurize_stage(cfg, &mut out)?,
        Stage::Train => train(cfg, &mut out)?,
        Stage::Evaluate => evaluate(cfg, &mut out)?,
        Stage::Select => select(cfg, &mut out)?,
        Stage::CompareOdds => compare_odds(cfg, &mut out)?,
        Stage::Report => report(cfg, &mut out)?,
    };

    let config_text = cfg.to_toml();
    let config_name = format!("config_{}.toml", stage.name());
    fs::write(cfg.out.join(&config_name), &config_text)?;
    let manifest = Manifest {
        stage: stage.name().into(),
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config_sha256: sha256_bytes(config_text.as_bytes()),
        rerun: vec![
            "tennis".into(),
            stage.name().into(),
            "--config".into(),
            cfg.out.join(&config_name).display().to_string(),
        ],
        inputs: digests(&inputs)?,
        outputs: digests(&out.written)?,
        config: cfg.clone(),
    };
    let mut w = BufWriter::new(File::create(cfg.out.join(format!("manifest_{}.json", stage.name())))?);
    serde_json::to_writer_pretty(&mut w, &manifest)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn ingest(cfg: &RunConfig, out: &mut Outputs) -> Result<Vec<PathBuf>> {
    if cfg.inputs.matches.is_empty() {
        return Err(CliError::Usage("ingest needs at least one --matches file".into()));
    }
    let delim = cfg.delimiter_byte().map_err(CliError::Usage)?;
    let mut quality = QualityReport::default();
    let mut records = Vec::new();
    for path in &cfg.inputs.matches {
        let parse = parse_matches(BufReader::new(File::open(path)?), &cfg.columns.matches, delim)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        quality.add_matches(&file_label(path), &parse);
        records.extend(parse.records);
    }
    let mut odds = Vec::new();
    for path in &cfg.inputs.odds {
        let parse = parse_odds(BufReader::new(File::open(path)?), &cfg.columns.odds, delim)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        quality.add_odds(&file_label(path), &parse);
        odds.extend(parse.records);
    }
    let (merged, stats) = merge_odds_within(records, &odds, cfg.merge_date_window_days);
    quality.set_merge(stats);
    let mut w = out.create(MERGED)?;
    write_merged(&mut w, &merged)?;
    w.flush()?;
    out.json(QUALITY, &quality)?;
    Ok(cfg.inputs.matches.iter().chain(&cfg.inputs.odds).cloned().collect())
}

fn file_label(path: &Path) -> String {
    path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned())
}

fn featurize_stage(cfg: &RunConfig, out: &mut Outputs) -> Result<Vec<PathBuf>> {
    let input = stage_input(cfg, MERGED)?;
    let matches = read_merged(BufReader::new(File::open(&input)?))
        .map_err(|e| CliError::Data(format!("{}: {e}", input.display())))?;
    let ds = featurize(&matches);
    let mut w = out.create(FEATURES)?;
    ds.write_csv(&mut w)?;
    w.flush()?;
    Ok(vec![input])
}

fn train(cfg: &RunConfig, out: &mut Outputs) -> Result<Vec<PathBuf>> {
    let (ds, input) = load_dataset(cfg)?;
    let all: Vec<usize> = (0..ds.len()).collect();
    let (filled, medians) = impute_medians(&ds.matrix, &ds.feature_names, &all)?;
    out.json(MEDIANS, &medians)?;
    for spec in specs(cfg) {
        let seed = tennis_core::rng::derive_seed(cfg.seed, "train", spec.kind as u64);
        let model = spec.fit(&filled, &ds.labels, seed)?;
        save_model(&out.path(&format!("model_{}.json", spec.kind)), &model, &ds.feature_names)?;
    }
    Ok(vec![input])
}

fn write_report_tables(out: &mut Outputs, json: &str, stem: &str, report: &EvaluationReport) -> Result<()> {
    out.json(json, report)?;
    let mut w = out.create(&format!("{stem}_summary.csv"))?;
    report.write_summary_csv(&mut w)?;
    w.flush()?;
    let mut w = out.create(&format!("{stem}_entries.csv"))?;
    report.write_entries_csv(&mut w)?;
    w.flush()?;
    Ok(())
}

fn evaluate(cfg: &RunConfig, out: &mut Outputs) -> Result<Vec<PathBuf>> {
    let (ds, input) = load_dataset(cfg)?;
    let report = cv_report(&ds, &specs(cfg), cfg.folds, cfg.seed, cfg.histogram_bins)?;
    write_report_tables(out, EVALUATION, "evaluation", &report)?;
    Ok(vec![input])
}

fn compare_odds(cfg: &RunConfig, out: &mut Outputs) -> Result<Vec<PathBuf>> {
    let (ds, input) = load_dataset(cfg)?;
    let opts = ProtocolOptions {
        seed: cfg.seed,
        normalize_odds: cfg.normalize_odds,
        bins: cfg.histogram_bins,
        all_entries_folds: cfg.all_entries_cv.then_some(cfg.folds),
    };
    let report = odds_protocol(&ds, &specs(cfg), &opts)?;
    write_report_tables(out, ODDS_REPORT, "odds", &report)?;
    Ok(vec![input])
}

fn select(cfg: &RunConfig, out: &mut Outputs) -> Result<Vec<PathBuf>> {
    let (ds, input) = load_dataset(cfg)?;
    let all: Vec<usize> = (0..ds.feature_names.len()).collect();
    for spec in specs(cfg) {
        let ctx = SelectionContext {
            spec: &spec,
            x: &ds.matrix,
            names: &ds.feature_names,
            y: &ds.labels,
            evaluator: cfg.selection_evaluator(),
            seed: cfg.seed,
        };
        let trace = run_selection(&ctx, &all)?;
        out.json(&format!("selection_{}.json", spec.kind), &trace)?;
        let mut w = out.create(&format!("selection_{}.csv", spec.kind))?;
        trace.write_tables_csv(&mut w)?;
        w.flush()?;
    }
    Ok(vec![input])
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_reader(BufReader::new(File::open(path)?))
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn report_table(md: &mut String, title: &str, r: &EvaluationReport) {
    let _ = writeln!(md, "## {title}\n\n{}; seed {}; {}.\n", r.protocol, r.seed, r.tie_rule);
    let _ = writeln!(md, "| source | population | entries | percent correct | total score | mean score |");
    let _ = writeln!(md, "|---|---|---:|---:|---:|---:|");
    for s in &r.summaries {
        let _ = writeln!(
            md,
            "| {} | {} | {} | {:.2} | {:.2} | {:.4} |",
            s.source,
            s.population,
            s.entries,
            100.0 * s.accuracy,
            s.total_score,
            s.mean_score
        );
    }
    for cv in &r.cross_validation {
        let _ = writeln!(md, "\n{} {}-fold mean accuracy {:.4}", cv.source, cv.folds, cv.mean_accuracy);
    }
    md.push('\n');
}

/// Collect whatever stage outputs exist in `out` into one markdown report.
fn report(cfg: &RunConfig, out: &mut Outputs) -> Result<Vec<PathBuf>> {
    let mut inputs = Vec::new();
    let mut md = String::from("# Tennis prediction report\n\n");
    let quality = cfg.out.join(QUALITY);
    if quality.exists() {
        let q: QualityReport = read_json(&quality)?;
        let _ = writeln!(
            md,
            "## Ingest\n\n{} match rows, {} odds rows, {} match row errors, {} odds row errors; \
             {} matches with odds, {} without.\n",
            q.match_rows_parsed,
            q.odds_rows_parsed,
            q.match_row_errors.len(),
            q.odds_row_errors.len(),
            q.merge.matched,
            q.merge.unmatched
        );
        inputs.push(quality);
    }
    for (file, title) in [(EVALUATION, "Cross-validation"), (ODDS_REPORT, "Odds comparison")] {
        let p = cfg.out.join(file);
        if p.exists() {
            report_table(&mut md, title, &read_json(&p)?);
            inputs.push(p);
        }
    }
    for kind in ModelKind::ALL {
        let p = cfg.out.join(format!("selection_{kind}.json"));
        if !p.exists() {
            continue;
        }
        let t: SelectionTrace = read_json(&p)?;
        let _ = writeln!(
            md,
            "## Feature selection ({kind})\n\nbaseline {:.4}; kept {} of {} after pruning ({:.4}); \
             final {:.4} with: {}\n",
            t.baseline_accuracy,
            t.kept.len(),
            t.full_set.len(),
            t.kept_accuracy,
            t.final_accuracy,
            t.final_set.join(", ")
        );
        inputs.push(p);
    }
    if inputs.is_empty() {
        return Err(CliError::Usage(format!("no stage outputs found in {}", cfg.out.display())));
    }
    fs::write(out.path(REPORT), md)?;
    Ok(inputs)
}
