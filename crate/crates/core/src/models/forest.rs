use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{train_tree_on, DecisionTree, TreeParams};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::{derive_seed, rng_from_seed, Rng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    /// Features tried per node; `None` means ⌈√d⌉.
    pub feature_subsample: Option<usize>,
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self { n_trees: 100, max_depth: None, min_leaf: 1, feature_subsample: None, bootstrap: true }
    }
}

impl ForestParams {
    pub fn tree_params(&self, n_features: usize) -> TreeParams {
        TreeParams {
            max_depth: self.max_depth,
            min_leaf: self.min_leaf,
            feature_subsample: Some(
                self.feature_subsample.unwrap_or_else(|| (n_features as f64).sqrt().ceil() as usize),
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub trees: Vec<DecisionTree>,
    pub tree_seeds: Vec<u64>,
    pub feature_subsample: usize,
    pub bootstrap: bool,
    pub n_features: usize,
}

/// Seed of tree `t` under the forest seed.
pub fn tree_seed(seed: u64, t: usize) -> u64 {
    derive_seed(seed, "tree", t as u64)
}

fn bootstrap_rows(n: usize, rng: &mut Rng) -> Vec<usize> {
    (0..n).map(|_| rng.gen_range(0..n)).collect()
}

/// Rows a tree was trained on, regenerated from its seed.
fn tree_rows(n: usize, bootstrap: bool, seed: u64) -> (Vec<usize>, Rng) {
    let mut rng = rng_from_seed(seed);
    let rows = if bootstrap { bootstrap_rows(n, &mut rng) } else { (0..n).collect() };
    (rows, rng)
}

/// Train `n_trees` trees in parallel. Each tree's bootstrap sample and feature draws come
/// from its own seed, so the result does not depend on thread scheduling.
pub fn train_forest(x: &Matrix, y: &[u8], params: &ForestParams, seed: u64) -> Result<ForestModel> {
    if x.n_rows() == 0 {
        return Err(Error::InvalidArgument("cannot train a forest on zero rows".into()));
    }
    if params.n_trees == 0 {
        return Err(Error::InvalidArgument("n_trees must be at least 1".into()));
    }
    let tp = params.tree_params(x.n_cols());
    let seeds: Vec<u64> = (0..params.n_trees).map(|t| tree_seed(seed, t)).collect();
    let trees = seeds
        .par_iter()
        .map(|&s| {
            let (rows, mut rng) = tree_rows(x.n_rows(), params.bootstrap, s);
            train_tree_on(x, y, &rows, &tp, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ForestModel {
        trees,
        tree_seeds: seeds,
        feature_subsample: tp.feature_subsample.unwrap_or(0),
        bootstrap: params.bootstrap,
        n_features: x.n_cols(),
    })
}

impl ForestModel {
    /// Mean over trees of the class-1 fraction in the leaf each tree assigns to `row`.
    pub fn predict_proba(&self, row: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.predict_proba(row)).sum::<f64>() / self.trees.len() as f64
    }

    /// Out-of-bag accuracy on the training data (`None` without bootstrap or if no row
    /// was ever out of bag). Rows with an OOB probability of exactly 0.5 count as wrong.
    pub fn oob_accuracy(&self, x: &Matrix, y: &[u8]) -> Option<f64> {
        if !self.bootstrap {
            return None;
        }
        let n = x.n_rows();
        let mut sum = vec![0.0; n];
        let mut votes = vec![0u32; n];
        for (tree, &s) in self.trees.iter().zip(&self.tree_seeds) {
            let (rows, _) = tree_rows(n, true, s);
            let mut in_bag = vec![false; n];
            rows.iter().for_each(|&i| in_bag[i] = true);
            for i in (0..n).filter(|&i| !in_bag[i]) {
                sum[i] += tree.predict_proba(x.row(i));
                votes[i] += 1;
            }
        }
        let scored: Vec<usize> = (0..n).filter(|&i| votes[i] > 0).collect();
        if scored.is_empty() {
            return None;
        }
        let ok = scored
            .iter()
            .filter(|&&i| {
                let p = sum[i] / f64::from(votes[i]);
                (p > 0.5 && y[i] == 1) || (p < 0.5 && y[i] == 0)
            })
            .count();
        Some(ok as f64 / scored.len() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::tree::{train_tree, Node};

    fn separable(n: usize) -> (Matrix, Vec<u8>) {
        let mut rng = rng_from_seed(99);
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for i in 0..n {
            let label = (i % 2) as u8;
            let centre = if label == 1 { 2.0 } else { -2.0 };
            rows.push(vec![centre + rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]);
            y.push(label);
        }
        (Matrix::from_rows(&rows).unwrap(), y)
    }

    #[test]
    fn degenerate_forest_equals_tree() {
        let (x, y) = separable(60);
        let params = ForestParams { n_trees: 1, bootstrap: false, ..Default::default() };
        let f = train_forest(&x, &y, &params, 5).unwrap();
        let t = train_tree(&x, &y, &params.tree_params(3), &mut rng_from_seed(tree_seed(5, 0))).unwrap();
        assert_eq!(f.trees[0], t);
        for i in 0..x.n_rows() {
            assert_eq!(f.predict_proba(x.row(i)), t.predict_proba(x.row(i)));
        }
    }

    #[test]
    fn separable_oob_accuracy() {
        let (x, y) = separable(200);
        let f = train_forest(&x, &y, &ForestParams { n_trees: 25, ..Default::default() }, 1).unwrap();
        assert!(f.oob_accuracy(&x, &y).unwrap() >= 0.9);
    }

    #[test]
    fn same_seed_same_forest() {
        let (x, y) = separable(80);
        let p = ForestParams { n_trees: 10, ..Default::default() };
        assert_eq!(train_forest(&x, &y, &p, 3).unwrap(), train_forest(&x, &y, &p, 3).unwrap());
        assert_ne!(train_forest(&x, &y, &p, 3).unwrap(), train_forest(&x, &y, &p, 4).unwrap());
    }

    fn leaf_tree(c0: u32, c1: u32) -> DecisionTree {
        DecisionTree { nodes: vec![Node::Leaf { counts: [c0, c1] }], n_features: 1 }
    }

    #[test]
    fn averages_leaf_fractions() {
        let f = ForestModel {
            trees: vec![leaf_tree(3, 1), leaf_tree(1, 3)],
            tree_seeds: vec![0, 1],
            feature_subsample: 1,
            bootstrap: false,
            n_features: 1,
        };
        assert_eq!(f.predict_proba(&[0.0]), 0.5);
        let pure = ForestModel { trees: vec![leaf_tree(0, 4), leaf_tree(0, 1)], ..f.clone() };
        assert_eq!(pure.predict_proba(&[0.0]), 1.0);
        let single = ForestModel { trees: vec![leaf_tree(2, 2)], ..f };
        assert_eq!(single.predict_proba(&[0.0]), 0.5);
    }

    #[test]
    fn default_subsample_is_ceil_sqrt() {
        assert_eq!(ForestParams::default().tree_params(28).feature_subsample, Some(6));
        assert_eq!(ForestParams::default().tree_params(9).feature_subsample, Some(3));
    }
}
