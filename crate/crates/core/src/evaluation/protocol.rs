use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::cv::{cross_validate, fit_predict};
use super::metrics::{implied_probability, is_correct, score_entry, total_score, Histogram, DEFAULT_BINS};
use crate::error::{Error, Result};
use crate::features::Dataset;
use crate::models::{ModelKind, ModelSpec};
use crate::rng::derive_seed;

pub const TIE_RULE: &str = "p > 0.5 predicts a win; p = 0.5 is counted incorrect";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    Forest,
    Logistic,
    Svm,
    Odds,
    ModelAverage,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Forest => "forest",
            Source::Logistic => "logistic",
            Source::Svm => "svm",
            Source::Odds => "odds",
            Source::ModelAverage => "model-average",
        }
    }
}

impl From<ModelKind> for Source {
    fn from(k: ModelKind) -> Self {
        match k {
            ModelKind::Forest => Source::Forest,
            ModelKind::Logistic => Source::Logistic,
            ModelKind::Svm => Source::Svm,
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredEntry {
    pub entry_id: usize,
    pub match_id: usize,
    pub source: Source,
    /// +1 for a win, −1 for a loss.
    pub w: i8,
    pub p: f64,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceSummary {
    pub source: Source,
    pub population: String,
    pub entries: usize,
    pub correct: usize,
    pub accuracy: f64,
    pub total_score: f64,
    pub mean_score: f64,
    pub histogram: Histogram,
}

/// How far the two entries of each match are from a coherent pair of probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Consistency {
    pub source: Source,
    pub population: String,
    pub paired_matches: usize,
    /// Mean of `|p_a + p_b − 1|` over paired matches.
    pub mean_abs_deviation: f64,
    pub max_abs_deviation: f64,
    /// Matches where both players are predicted to win or both to lose.
    pub contradictory: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvSummary {
    pub source: Source,
    pub folds: usize,
    pub fold_accuracies: Vec<f64>,
    pub mean_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub protocol: String,
    pub seed: u64,
    pub normalize_odds: bool,
    pub tie_rule: String,
    pub train_entries: usize,
    pub test_entries: usize,
    pub summaries: Vec<SourceSummary>,
    pub consistency: Vec<Consistency>,
    pub cross_validation: Vec<CvSummary>,
    #[serde(skip)]
    pub entries: Vec<ScoredEntry>,
}

/// Identity and outcome of one evaluated row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntryRef {
    pub entry_id: usize,
    pub match_id: usize,
    pub won: bool,
}

pub struct Scored {
    pub summaries: Vec<SourceSummary>,
    pub entries: Vec<ScoredEntry>,
    pub consistency: Vec<Consistency>,
}

/// Score every source's probabilities against the outcomes of `rows`.
pub fn score_sources(rows: &[EntryRef], sources: &[(Source, Vec<f64>)], population: &str, bins: usize) -> Result<Scored> {
    let mut out = Scored { summaries: vec![], entries: vec![], consistency: vec![] };
    for (source, probs) in sources {
        if probs.len() != rows.len() {
            return Err(Error::Dimension { expected: rows.len(), got: probs.len() });
        }
        if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::Data(format!("{source} probability {p} outside [0, 1]")));
        }
        let scores: Vec<f64> = rows.iter().zip(probs).map(|(r, &p)| score_entry(r.won, p)).collect();
        let correct = rows.iter().zip(probs).filter(|(r, &p)| is_correct(r.won, p)).count();
        let n = rows.len();
        let total = total_score(&scores);
        out.summaries.push(SourceSummary {
            source: *source,
            population: population.to_string(),
            entries: n,
            correct,
            accuracy: if n == 0 { 0.0 } else { correct as f64 / n as f64 },
            total_score: total,
            mean_score: if n == 0 { 0.0 } else { total / n as f64 },
            histogram: Histogram::new(&scores, bins, -0.5, 0.5)?,
        });
        out.entries.extend(rows.iter().zip(probs).zip(&scores).map(|((r, &p), &score)| ScoredEntry {
            entry_id: r.entry_id,
            match_id: r.match_id,
            source: *source,
            w: if r.won { 1 } else { -1 },
            p,
            score,
        }));

        let mut by_match: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        for (r, &p) in rows.iter().zip(probs) {
            by_match.entry(r.match_id).or_default().push(p);
        }
        let devs: Vec<(f64, bool)> = by_match
            .values()
            .filter(|ps| ps.len() == 2)
            .map(|ps| ((ps[0] + ps[1] - 1.0).abs(), (ps[0] > 0.5) == (ps[1] > 0.5)))
            .collect();
        out.consistency.push(Consistency {
            source: *source,
            population: population.to_string(),
            paired_matches: devs.len(),
            mean_abs_deviation: if devs.is_empty() { 0.0 } else { devs.iter().map(|d| d.0).sum::<f64>() / devs.len() as f64 },
            max_abs_deviation: devs.iter().map(|d| d.0).fold(0.0, f64::max),
            contradictory: devs.iter().filter(|d| d.1).count(),
        });
    }
    Ok(out)
}

fn average_source(sources: &[(Source, Vec<f64>)], n: usize) -> Option<(Source, Vec<f64>)> {
    let models: Vec<&Vec<f64>> =
        sources.iter().filter(|(s, _)| !matches!(s, Source::Odds | Source::ModelAverage)).map(|(_, p)| p).collect();
    if models.len() < 2 {
        return None;
    }
    let avg = (0..n).map(|i| models.iter().map(|p| p[i]).sum::<f64>() / models.len() as f64).collect();
    Some((Source::ModelAverage, avg))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProtocolOptions {
    pub seed: u64,
    /// Overround-normalize implied probabilities (otherwise raw `1 / odds`).
    pub normalize_odds: bool,
    pub bins: usize,
    /// Also cross-validate each model on every entry with this many folds.
    pub all_entries_folds: Option<usize>,
}

impl Default for ProtocolOptions {
    fn default() -> Self {
        Self { seed: 0, normalize_odds: true, bins: DEFAULT_BINS, all_entries_folds: None }
    }
}

fn entry_refs(ds: &Dataset, rows: &[usize]) -> Vec<EntryRef> {
    rows.iter()
        .map(|&i| EntryRef { entry_id: ds.entries[i].entry_id, match_id: ds.entries[i].match_id, won: ds.labels[i] == 1 })
        .collect()
}

/// Train on entries without odds, evaluate on entries with odds, and compare each model
/// to the bookmaker-implied probabilities.
pub fn odds_protocol(ds: &Dataset, specs: &[ModelSpec], opts: &ProtocolOptions) -> Result<EvaluationReport> {
    let pairs = ds.odds_pairs();
    let test: Vec<usize> = (0..ds.len()).filter(|&i| pairs[i].is_some()).collect();
    let train: Vec<usize> = (0..ds.len()).filter(|&i| pairs[i].is_none()).collect();
    if test.is_empty() || train.is_empty() {
        return Err(Error::Data(format!(
            "odds protocol needs entries both with and without odds (have {} with, {} without)",
            test.len(),
            train.len()
        )));
    }
    let mut sources = Vec::new();
    for (m, spec) in specs.iter().enumerate() {
        let seed = derive_seed(opts.seed, "protocol-model", m as u64);
        let probs = fit_predict(spec, &ds.matrix, &ds.feature_names, &ds.labels, &train, &test, seed)?;
        sources.push((Source::from(spec.kind), probs));
    }
    let odds: Vec<f64> = test
        .iter()
        .map(|&i| {
            let (own, opp) = pairs[i].expect("test rows have odds");
            implied_probability(own, opp, opts.normalize_odds)
        })
        .collect::<Result<_>>()?;
    sources.push((Source::Odds, odds));
    if let Some(avg) = average_source(&sources, test.len()) {
        sources.push(avg);
    }
    let scored = score_sources(&entry_refs(ds, &test), &sources, "odds-present", opts.bins)?;
    let mut report = EvaluationReport {
        protocol: "train on entries without odds, test on entries with odds".into(),
        seed: opts.seed,
        normalize_odds: opts.normalize_odds,
        tie_rule: TIE_RULE.into(),
        train_entries: train.len(),
        test_entries: test.len(),
        summaries: scored.summaries,
        consistency: scored.consistency,
        cross_validation: vec![],
        entries: scored.entries,
    };
    if let Some(k) = opts.all_entries_folds {
        let all = cv_report(ds, specs, k, opts.seed, opts.bins)?;
        report.summaries.extend(all.summaries);
        report.consistency.extend(all.consistency);
        report.cross_validation = all.cross_validation;
    }
    Ok(report)
}

/// k-fold cross-validation of each model over every entry, scored on out-of-fold
/// probabilities.
pub fn cv_report(ds: &Dataset, specs: &[ModelSpec], k: usize, seed: u64, bins: usize) -> Result<EvaluationReport> {
    let mut sources = Vec::new();
    let mut cvs = Vec::new();
    for spec in specs {
        let cv = cross_validate(spec, &ds.matrix, &ds.feature_names, &ds.labels, k, seed)?;
        cvs.push(CvSummary {
            source: spec.kind.into(),
            folds: k,
            fold_accuracies: cv.fold_accuracies.clone(),
            mean_accuracy: cv.mean_accuracy,
        });
        sources.push((Source::from(spec.kind), cv.oof_proba));
    }
    if let Some(avg) = average_source(&sources, ds.len()) {
        sources.push(avg);
    }
    let all: Vec<usize> = (0..ds.len()).collect();
    let scored = score_sources(&entry_refs(ds, &all), &sources, "all-entries-out-of-fold", bins)?;
    Ok(EvaluationReport {
        protocol: format!("{k}-fold cross-validation over all entries"),
        seed,
        normalize_odds: true,
        tie_rule: TIE_RULE.into(),
        train_entries: ds.len(),
        test_entries: ds.len(),
        summaries: scored.summaries,
        consistency: scored.consistency,
        cross_validation: cvs,
        entries: scored.entries,
    })
}

impl EvaluationReport {
    /// One row per (source, population), mirroring the accuracy/score comparison table.
    pub fn write_summary_csv<W: Write>(&self, sink: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(sink);
        w.write_record(["source", "population", "entries", "correct", "percent_correct", "total_score", "mean_score"])?;
        for s in &self.summaries {
            w.write_record([
                s.source.to_string(),
                s.population.clone(),
                s.entries.to_string(),
                s.correct.to_string(),
                format!("{:.2}", 100.0 * s.accuracy),
                format!("{:.2}", s.total_score),
                format!("{:.6}", s.mean_score),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_entries_csv<W: Write>(&self, sink: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(sink);
        w.write_record(["entry_id", "match_id", "source", "w", "p", "score"])?;
        for e in &self.entries {
            w.write_record([
                e.entry_id.to_string(),
                e.match_id.to_string(),
                e.source.to_string(),
                e.w.to_string(),
                e.p.to_string(),
                e.score.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn summary(&self, source: Source, population: &str) -> Option<&SourceSummary> {
        self.summaries.iter().find(|s| s.source == source && s.population == population)
    }
}
