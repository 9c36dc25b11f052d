//! Binary classifiers producing `P(label = 1)`.

pub mod forest;
pub mod logistic;
pub mod persist;
pub mod standardize;
pub mod svm;
pub mod tree;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use forest::{train_forest, ForestModel, ForestParams};
pub use logistic::{train_logistic, LogisticModel, LogisticParams};
pub use persist::{load_model, save_model};
pub use standardize::Standardizer;
pub use svm::{train_svm_rbf, SvmModel, SvmParams};
pub use tree::{train_tree, DecisionTree, TreeParams};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Forest,
    Logistic,
    Svm,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Forest, ModelKind::Logistic, ModelKind::Svm];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Forest => "forest",
            ModelKind::Logistic => "logistic",
            ModelKind::Svm => "svm",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "forest" | "rf" | "random_forest" => Ok(ModelKind::Forest),
            "logistic" | "lr" | "logreg" => Ok(ModelKind::Logistic),
            "svm" => Ok(ModelKind::Svm),
            other => Err(Error::InvalidArgument(format!("unknown model `{other}`"))),
        }
    }
}

/// Hyperparameters for every model family.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelParams {
    pub forest: ForestParams,
    pub logistic: LogisticParams,
    pub svm: SvmParams,
}

impl ModelParams {
    pub fn fit(&self, kind: ModelKind, x: &Matrix, y: &[u8], seed: u64) -> Result<TrainedModel> {
        if x.n_rows() != y.len() {
            return Err(Error::Dimension { expected: x.n_rows(), got: y.len() });
        }
        if let Some(v) = x.as_slice().iter().find(|v| !v.is_finite()) {
            return Err(Error::Data(format!("training matrix contains non-finite value {v}; impute first")));
        }
        if let Some(l) = y.iter().find(|&&l| l > 1) {
            return Err(Error::Data(format!("label {l} is not 0 or 1")));
        }
        Ok(match kind {
            ModelKind::Forest => TrainedModel::Forest(train_forest(x, y, &self.forest, seed)?),
            ModelKind::Logistic => TrainedModel::Logistic(train_logistic(x, y, &self.logistic)?),
            ModelKind::Svm => TrainedModel::Svm(train_svm_rbf(x, y, &self.svm, seed)?),
        })
    }
}

/// A model family together with its hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub params: ModelParams,
}

impl ModelSpec {
    pub fn new(kind: ModelKind, params: ModelParams) -> Self {
        Self { kind, params }
    }

    pub fn fit(&self, x: &Matrix, y: &[u8], seed: u64) -> Result<TrainedModel> {
        self.params.fit(self.kind, x, y, seed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TrainedModel {
    Forest(ForestModel),
    Logistic(LogisticModel),
    Svm(SvmModel),
}

impl TrainedModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            TrainedModel::Forest(_) => ModelKind::Forest,
            TrainedModel::Logistic(_) => ModelKind::Logistic,
            TrainedModel::Svm(_) => ModelKind::Svm,
        }
    }

    pub fn n_features(&self) -> usize {
        match self {
            TrainedModel::Forest(m) => m.n_features,
            TrainedModel::Logistic(m) => m.weights.len(),
            TrainedModel::Svm(m) => m.n_features,
        }
    }

    pub fn predict_proba(&self, row: &[f64]) -> Result<f64> {
        if row.len() != self.n_features() {
            return Err(Error::Dimension { expected: self.n_features(), got: row.len() });
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data("cannot predict on a row with missing or non-finite values".into()));
        }
        Ok(match self {
            TrainedModel::Forest(m) => m.predict_proba(row),
            TrainedModel::Logistic(m) => m.predict_proba(row),
            TrainedModel::Svm(m) => m.predict_proba(row),
        })
    }

    pub fn predict_matrix(&self, x: &Matrix) -> Result<Vec<f64>> {
        (0..x.n_rows()).into_par_iter().map(|i| self.predict_proba(x.row(i))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_round_trip() {
        for k in ModelKind::ALL {
            assert_eq!(k.as_str().parse::<ModelKind>().unwrap(), k);
        }
        assert!("tree".parse::<ModelKind>().is_err());
    }

    #[test]
    fn dimension_and_missing_checks() {
        let x = Matrix::new(4, 2, vec![0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0]).unwrap();
        let y = [0, 0, 1, 1];
        let p = ModelParams::default();
        for k in ModelKind::ALL {
            let m = p.fit(k, &x, &y, 1).unwrap();
            assert_eq!(m.n_features(), 2);
            assert!(matches!(m.predict_proba(&[1.0]), Err(Error::Dimension { expected: 2, got: 1 })));
            assert!(m.predict_proba(&[f64::NAN, 1.0]).is_err());
            let probs = m.predict_matrix(&x).unwrap();
            assert!(probs.iter().all(|p| (0.0..=1.0).contains(p)));
        }
        let bad = Matrix::new(1, 2, vec![f64::NAN, 0.0]).unwrap();
        assert!(p.fit(ModelKind::Forest, &bad, &[1], 0).is_err());
    }
}
