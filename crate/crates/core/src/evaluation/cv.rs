use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::accuracy;
use super::split::kfold_split;
use crate::error::{Error, Result};
use crate::ingest::impute_medians;
use crate::matrix::Matrix;
use crate::models::ModelSpec;
use crate::rng::derive_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub seed: u64,
    pub fold_sizes: Vec<usize>,
    pub fold_accuracies: Vec<f64>,
    pub mean_accuracy: f64,
    /// Held-out probability for every row.
    #[serde(skip)]
    pub oof_proba: Vec<f64>,
}

/// Seed used to train the model of fold `f`.
pub fn fold_model_seed(seed: u64, f: usize) -> u64 {
    derive_seed(seed, "cv-model", f as u64)
}

/// Fit medians on `train`, train on `train`, return probabilities for `test`.
pub fn fit_predict(
    spec: &ModelSpec,
    x: &Matrix,
    names: &[String],
    y: &[u8],
    train: &[usize],
    test: &[usize],
    seed: u64,
) -> Result<Vec<f64>> {
    let (filled, _) = impute_medians(x, names, train)?;
    let y_train: Vec<u8> = train.iter().map(|&i| y[i]).collect();
    let model = spec.fit(&filled.select_rows(train), &y_train, seed)?;
    model.predict_matrix(&filled.select_rows(test))
}

/// k-fold cross-validation with per-fold median imputation. Folds run in parallel; the
/// result does not depend on scheduling.
pub fn cross_validate(spec: &ModelSpec, x: &Matrix, names: &[String], y: &[u8], k: usize, seed: u64) -> Result<CvResult> {
    let folds = kfold_split(y.len(), k, seed)?;
    cross_validate_with_folds(spec, x, names, y, &folds, seed)
}

/// Cross-validation over explicit held-out index sets, which must partition the rows.
pub fn cross_validate_with_folds(
    spec: &ModelSpec,
    x: &Matrix,
    names: &[String],
    y: &[u8],
    folds: &[Vec<usize>],
    seed: u64,
) -> Result<CvResult> {
    if x.n_rows() != y.len() {
        return Err(Error::Dimension { expected: x.n_rows(), got: y.len() });
    }
    let n = y.len();
    let mut seen = vec![false; n];
    for &i in folds.iter().flatten() {
        if i >= n || std::mem::replace(&mut seen[i], true) {
            return Err(Error::InvalidArgument(format!("folds do not partition {n} rows")));
        }
    }
    if folds.len() < 2 || seen.contains(&false) || folds.iter().any(Vec::is_empty) {
        return Err(Error::InvalidArgument(format!("folds do not partition {n} rows")));
    }
    let results: Vec<Result<Vec<f64>>> = folds
        .par_iter()
        .enumerate()
        .map(|(f, test)| {
            let mut held = vec![false; n];
            test.iter().for_each(|&i| held[i] = true);
            let train: Vec<usize> = (0..n).filter(|&i| !held[i]).collect();
            fit_predict(spec, x, names, y, &train, test, fold_model_seed(seed, f))
                .map_err(|e| Error::Fold { fold: f, source: Box::new(e) })
        })
        .collect();

    let mut oof_proba = vec![f64::NAN; n];
    let mut fold_accuracies = Vec::with_capacity(folds.len());
    for (test, r) in folds.iter().zip(results) {
        let probs = r?;
        let labels: Vec<u8> = test.iter().map(|&i| y[i]).collect();
        fold_accuracies.push(accuracy(&labels, &probs));
        for (&i, p) in test.iter().zip(probs) {
            oof_proba[i] = p;
        }
    }
    let mean_accuracy = fold_accuracies.iter().sum::<f64>() / folds.len() as f64;
    Ok(CvResult { seed, fold_sizes: folds.iter().map(Vec::len).collect(), fold_accuracies, mean_accuracy, oof_proba })
}

/// Accuracy on a single seeded train/test split.
pub fn holdout_accuracy(spec: &ModelSpec, x: &Matrix, names: &[String], y: &[u8], fraction: f64, seed: u64) -> Result<f64> {
    let (train, test) = super::split::holdout_split(y.len(), fraction, seed)?;
    let probs = fit_predict(spec, x, names, y, &train, &test, derive_seed(seed, "holdout-model", 0))?;
    let labels: Vec<u8> = test.iter().map(|&i| y[i]).collect();
    Ok(accuracy(&labels, &probs))
}
