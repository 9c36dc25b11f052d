//! CART-style binary classification tree with the Gini criterion.

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::Rng;

/// Gini impurity `1 - Σ p²` of a (class 0, class 1) count pair.
pub fn gini(counts: [u64; 2]) -> Result<f64> {
    let n = counts[0] + counts[1];
    if n == 0 {
        return Err(Error::InvalidArgument("gini of an empty node".into()));
    }
    let (p0, p1) = (counts[0] as f64 / n as f64, counts[1] as f64 / n as f64);
    Ok(1.0 - (p0 * p0 + p1 * p1))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    /// `None` grows until another stopping rule applies.
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    /// Features considered per node; `None` considers all.
    pub feature_subsample: Option<usize>,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self { max_depth: None, min_leaf: 1, feature_subsample: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf { counts: [u32; 2] },
    /// Rows with `x[feature] <= threshold` go left.
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
    pub n_features: usize,
}

impl DecisionTree {
    pub fn leaf_counts(&self, row: &[f64]) -> [u32; 2] {
        let mut k = 0;
        loop {
            match self.nodes[k] {
                Node::Leaf { counts } => return counts,
                Node::Split { feature, threshold, left, right } => {
                    k = if row[feature] <= threshold { left } else { right };
                }
            }
        }
    }

    /// Class-1 fraction of the leaf reached by `row`.
    pub fn predict_proba(&self, row: &[f64]) -> f64 {
        let [c0, c1] = self.leaf_counts(row);
        f64::from(c1) / f64::from(c0 + c1)
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], k: usize) -> usize {
            match nodes[k] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(nodes, left).max(go(nodes, right)),
            }
        }
        go(&self.nodes, 0)
    }

    pub fn leaves(&self) -> impl Iterator<Item = [u32; 2]> + '_ {
        self.nodes.iter().filter_map(|n| match n {
            Node::Leaf { counts } => Some(*counts),
            Node::Split { .. } => None,
        })
    }
}

/// Split score `Σ_child (c0² + c1²) / n_child` kept as an exact fraction `num / den`;
/// a larger score means lower weighted child impurity.
#[derive(Clone, Copy)]
struct Score {
    num: u128,
    den: u128,
}

impl Score {
    fn of(l: [u64; 2], r: [u64; 2]) -> Self {
        let sq = |c: [u64; 2]| u128::from(c[0]) * u128::from(c[0]) + u128::from(c[1]) * u128::from(c[1]);
        let (nl, nr) = (u128::from(l[0] + l[1]), u128::from(r[0] + r[1]));
        Score { num: sq(l) * nr + sq(r) * nl, den: nl * nr }
    }

    fn gt(self, o: Score) -> bool {
        self.num * o.den > o.num * self.den
    }
}

struct Builder<'a> {
    x: &'a Matrix,
    y: &'a [u8],
    params: &'a TreeParams,
    rng: &'a mut Rng,
    nodes: Vec<Node>,
    buf: Vec<(f64, u8)>,
}

impl Builder<'_> {
    fn counts(&self, rows: &[usize]) -> [u64; 2] {
        let mut c = [0u64; 2];
        for &i in rows {
            c[usize::from(self.y[i])] += 1;
        }
        c
    }

    fn leaf(&mut self, c: [u64; 2]) -> usize {
        self.nodes.push(Node::Leaf { counts: [c[0] as u32, c[1] as u32] });
        self.nodes.len() - 1
    }

    fn best_split(&mut self, rows: &[usize], parent: [u64; 2]) -> Option<(usize, f64)> {
        let d = self.x.n_cols();
        let k = self.params.feature_subsample.unwrap_or(d).min(d);
        let mut features: Vec<usize> = if k < d { sample(self.rng, d, k).into_vec() } else { (0..d).collect() };
        features.sort_unstable();

        let min_leaf = self.params.min_leaf.max(1) as u64;
        let n = parent[0] + parent[1];
        // a split must beat the parent: score * n > c0² + c1²
        let parent_sq = u128::from(parent[0]).pow(2) + u128::from(parent[1]).pow(2);
        let mut best: Option<(Score, usize, f64)> = None;
        for f in features {
            self.buf.clear();
            self.buf.extend(rows.iter().map(|&i| (self.x.get(i, f), self.y[i])));
            self.buf.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
            let mut left = [0u64; 2];
            for p in 0..self.buf.len() - 1 {
                left[usize::from(self.buf[p].1)] += 1;
                let (v, next) = (self.buf[p].0, self.buf[p + 1].0);
                if v == next {
                    continue;
                }
                let nl = (p + 1) as u64;
                if nl < min_leaf || n - nl < min_leaf {
                    continue;
                }
                let right = [parent[0] - left[0], parent[1] - left[1]];
                let s = Score::of(left, right);
                if s.num * u128::from(n) <= parent_sq * s.den {
                    continue;
                }
                if best.as_ref().is_none_or(|(b, _, _)| s.gt(*b)) {
                    let mid = v + (next - v) / 2.0;
                    let thr = if mid < next { mid } else { v };
                    best = Some((s, f, thr));
                }
            }
        }
        best.map(|(_, f, t)| (f, t))
    }

    fn grow(&mut self, rows: &mut [usize], depth: usize) -> usize {
        let c = self.counts(rows);
        let n = c[0] + c[1];
        let pure = c[0] == 0 || c[1] == 0;
        let at_depth = self.params.max_depth.is_some_and(|m| depth >= m);
        if pure || at_depth || n < 2 * self.params.min_leaf.max(1) as u64 {
            return self.leaf(c);
        }
        let Some((feature, threshold)) = self.best_split(rows, c) else {
            return self.leaf(c);
        };
        let mut split = 0;
        for k in 0..rows.len() {
            if self.x.get(rows[k], feature) <= threshold {
                rows.swap(k, split);
                split += 1;
            }
        }
        let me = self.nodes.len();
        self.nodes.push(Node::Leaf { counts: [0, 0] });
        let (l, r) = rows.split_at_mut(split);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[me] = Node::Split { feature, threshold, left, right };
        me
    }
}

/// Grow a tree on `rows` of `x` (repeats allowed, as in a bootstrap sample).
///
/// At each node the best Gini split over a random feature subset is taken; thresholds
/// are midpoints between adjacent distinct values. Growth stops at `max_depth`, when a
/// child would hold fewer than `min_leaf` rows, or when no split reduces impurity. Ties
/// go to the lowest feature index, then the lowest threshold.
pub fn train_tree_on(x: &Matrix, y: &[u8], rows: &[usize], params: &TreeParams, rng: &mut Rng) -> Result<DecisionTree> {
    if rows.is_empty() {
        return Err(Error::InvalidArgument("cannot train a tree on zero rows".into()));
    }
    if y.len() != x.n_rows() {
        return Err(Error::Dimension { expected: x.n_rows(), got: y.len() });
    }
    if y.iter().any(|&l| l > 1) {
        return Err(Error::InvalidArgument("labels must be 0 or 1".into()));
    }
    let mut work = rows.to_vec();
    let mut b = Builder { x, y, params, rng, nodes: Vec::new(), buf: Vec::with_capacity(rows.len()) };
    b.grow(&mut work, 0);
    Ok(DecisionTree { nodes: b.nodes, n_features: x.n_cols() })
}

pub fn train_tree(x: &Matrix, y: &[u8], params: &TreeParams, rng: &mut Rng) -> Result<DecisionTree> {
    let rows: Vec<usize> = (0..x.n_rows()).collect();
    train_tree_on(x, y, &rows, params, rng)
}
