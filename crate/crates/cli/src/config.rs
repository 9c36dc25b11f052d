//! Run configuration: a TOML file whose every field except the input paths has a default.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tennis_core::ingest::{MatchColumns, OddsColumns};
use tennis_core::models::{ModelKind, ModelParams};
use tennis_core::selection::Evaluator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvaluatorKind {
    Cv,
    Holdout,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Inputs {
    /// Match files in the column layout of `columns.matches`.
    pub matches: Vec<PathBuf>,
    /// Bookmaker odds files in the column layout of `columns.odds`.
    pub odds: Vec<PathBuf>,
    /// Stage-input override; defaults to the previous stage's output in `out`.
    pub input: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Columns {
    pub matches: MatchColumns,
    pub odds: OddsColumns,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Master seed; every random stream is derived from it.
    pub seed: u64,
    pub folds: usize,
    pub holdout_fraction: f64,
    /// Accuracy estimator used by feature selection.
    pub evaluator: EvaluatorKind,
    pub models: Vec<ModelKind>,
    pub out: PathBuf,
    /// Single-character field delimiter of the match and odds files.
    pub delimiter: char,
    /// Accept odds dated up to this many days after the match's date.
    pub merge_date_window_days: u32,
    /// Overround-normalize implied probabilities (false: raw 1/odds).
    pub normalize_odds: bool,
    pub histogram_bins: usize,
    /// compare-odds also cross-validates every model over all entries.
    pub all_entries_cv: bool,
    /// Restrict training and evaluation to these features (empty: all).
    pub features: Vec<String>,
    pub inputs: Inputs,
    pub columns: Columns,
    pub params: ModelParams,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            folds: 10,
            holdout_fraction: 0.2,
            evaluator: EvaluatorKind::Cv,
            models: ModelKind::ALL.to_vec(),
            out: PathBuf::from("out"),
            delimiter: ',',
            merge_date_window_days: 0,
            normalize_odds: true,
            histogram_bins: 20,
            all_entries_cv: false,
            features: vec![],
            inputs: Inputs::default(),
            columns: Columns::default(),
            params: ModelParams::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn selection_evaluator(&self) -> Evaluator {
        match self.evaluator {
            EvaluatorKind::Cv => Evaluator::CrossValidation { folds: self.folds },
            EvaluatorKind::Holdout => Evaluator::Holdout { fraction: self.holdout_fraction },
        }
    }

    pub fn delimiter_byte(&self) -> Result<u8, String> {
        u8::try_from(self.delimiter).map_err(|_| format!("delimiter `{}` is not a single byte", self.delimiter))
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.folds < 2 {
            return Err(format!("folds must be at least 2, got {}", self.folds));
        }
        if !(self.holdout_fraction > 0.0 && self.holdout_fraction < 1.0) {
            return Err(format!("holdout_fraction must be in (0, 1), got {}", self.holdout_fraction));
        }
        if self.models.is_empty() {
            return Err("at least one model is required".into());
        }
        if self.histogram_bins == 0 {
            return Err("histogram_bins must be positive".into());
        }
        self.delimiter_byte()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_through_toml() {
        let mut c = RunConfig::default();
        c.inputs.matches = vec!["a.csv".into()];
        c.params.forest.n_trees = 7;
        let back: RunConfig = toml::from_str(&c.to_toml()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn partial_file_fills_defaults() {
        let c: RunConfig = toml::from_str("seed = 7\nmodels = [\"forest\"]\n[params.forest]\nn_trees = 5\n").unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.folds, 10);
        assert_eq!(c.models, vec![ModelKind::Forest]);
        assert_eq!(c.params.forest.n_trees, 5);
        assert_eq!(c.params.forest.min_leaf, 1);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<RunConfig>("sead = 7").is_err());
    }
}
