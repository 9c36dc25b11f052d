//! Wrapper feature selection: leave-one-out removal scan, pruning, single re-addition scan
//! and ordered cumulative re-addition with a strict-improvement stop.
//!
//! Feature subsets are sorted column-index lists into the dataset matrix. Every accuracy is
//! produced by the same evaluator and seed, so any recorded value can be reproduced by
//! retraining on the recorded subset.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::{cross_validate, holdout_accuracy};
use crate::matrix::Matrix;
use crate::models::ModelSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Evaluator {
    CrossValidation { folds: usize },
    Holdout { fraction: f64 },
}

impl Default for Evaluator {
    fn default() -> Self {
        Evaluator::CrossValidation { folds: 10 }
    }
}

/// Everything needed to score a feature subset.
pub struct SelectionContext<'a> {
    pub spec: &'a ModelSpec,
    pub x: &'a Matrix,
    pub names: &'a [String],
    pub y: &'a [u8],
    pub evaluator: Evaluator,
    pub seed: u64,
}

impl SelectionContext<'_> {
    pub fn accuracy(&self, features: &[usize]) -> Result<f64> {
        let mut cols = features.to_vec();
        cols.sort_unstable();
        cols.dedup();
        if let Some(&c) = cols.iter().find(|&&c| c >= self.x.n_cols()) {
            return Err(Error::InvalidArgument(format!("feature index {c} out of range")));
        }
        let x = self.x.select_cols(&cols);
        let names: Vec<String> = cols.iter().map(|&c| self.names[c].clone()).collect();
        match self.evaluator {
            Evaluator::CrossValidation { folds } => {
                Ok(cross_validate(self.spec, &x, &names, self.y, folds, self.seed)?.mean_accuracy)
            }
            Evaluator::Holdout { fraction } => holdout_accuracy(self.spec, &x, &names, self.y, fraction, self.seed),
        }
    }
}

fn without(set: &[usize], f: usize) -> Vec<usize> {
    set.iter().copied().filter(|&g| g != f).collect()
}

fn with(set: &[usize], f: usize) -> Vec<usize> {
    let mut s = set.to_vec();
    s.push(f);
    s.sort_unstable();
    s
}

/// Accuracy with each feature of `set` left out, in `set` order.
pub fn removal_scan(ctx: &SelectionContext, set: &[usize]) -> Result<Vec<(usize, f64)>> {
    if set.len() < 2 {
        return Err(Error::InvalidArgument("removal scan needs at least two features".into()));
    }
    set.par_iter().map(|&f| Ok((f, ctx.accuracy(&without(set, f))?))).collect()
}

/// Keep a feature iff leaving it out lowered accuracy below `baseline`.
pub fn prune(removal: &[(usize, f64)], baseline: f64) -> (Vec<usize>, Vec<usize>) {
    let (kept, removed): (Vec<_>, Vec<_>) = removal.iter().partition(|(_, acc)| *acc < baseline);
    let ids = |v: Vec<&(usize, f64)>| {
        let mut ids: Vec<usize> = v.into_iter().map(|(f, _)| *f).collect();
        ids.sort_unstable();
        ids
    };
    (ids(kept), ids(removed))
}

/// Accuracy of `kept` plus each removed feature on its own.
pub fn readd_scan(ctx: &SelectionContext, kept: &[usize], removed: &[usize]) -> Result<Vec<(usize, f64)>> {
    if removed.is_empty() {
        return Err(Error::InvalidArgument("re-addition scan needs at least one removed feature".into()));
    }
    removed.par_iter().map(|&f| Ok((f, ctx.accuracy(&with(kept, f))?))).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathStep {
    pub feature: usize,
    pub accuracy: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CumulativeResult {
    pub path: Vec<PathStep>,
    pub final_set: Vec<usize>,
    pub final_accuracy: f64,
}

/// Order candidates by descending single-addition accuracy, ties by feature index.
pub fn gain_order(readd: &[(usize, f64)]) -> Vec<usize> {
    let mut order = readd.to_vec();
    order.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    order.into_iter().map(|(f, _)| f).collect()
}

/// Add `order` one feature at a time, keeping an addition only if accuracy strictly rises;
/// stop at the first addition that does not.
pub fn cumulative_add(ctx: &SelectionContext, kept: &[usize], kept_accuracy: f64, order: &[usize]) -> Result<CumulativeResult> {
    let mut set = kept.to_vec();
    set.sort_unstable();
    let mut best = kept_accuracy;
    let mut path = Vec::new();
    for &f in order {
        let candidate = with(&set, f);
        let acc = ctx.accuracy(&candidate)?;
        let accepted = acc > best;
        path.push(PathStep { feature: f, accuracy: acc, accepted });
        if !accepted {
            break;
        }
        set = candidate;
        best = acc;
    }
    Ok(CumulativeResult { path, final_set: set, final_accuracy: best })
}

/// Accuracy of every prefix of `order`.
pub fn sequential_forward(ctx: &SelectionContext, order: &[usize]) -> Result<Vec<(usize, f64)>> {
    if order.is_empty() {
        return Err(Error::InvalidArgument("forward curve needs a nonempty feature order".into()));
    }
    (1..=order.len()).into_par_iter().map(|k| Ok((order[k - 1], ctx.accuracy(&order[..k])?))).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureAccuracy {
    pub feature: String,
    pub index: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub feature: String,
    pub index: usize,
    pub accuracy: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionTrace {
    pub model: ModelSpec,
    pub evaluator: Evaluator,
    pub seed: u64,
    pub full_set: Vec<String>,
    pub baseline_accuracy: f64,
    pub removal: Vec<FeatureAccuracy>,
    pub kept: Vec<String>,
    pub removed: Vec<String>,
    pub kept_accuracy: f64,
    pub readd: Vec<FeatureAccuracy>,
    pub cumulative: Vec<TraceStep>,
    pub final_set: Vec<String>,
    pub final_accuracy: f64,
}

/// The full procedure over `set`: baseline, removal scan, prune, re-addition scan and
/// cumulative re-addition.
pub fn run_selection(ctx: &SelectionContext, set: &[usize]) -> Result<SelectionTrace> {
    let mut set = set.to_vec();
    set.sort_unstable();
    set.dedup();
    let name = |i: usize| ctx.names[i].clone();
    let names = |v: &[usize]| v.iter().map(|&i| name(i)).collect::<Vec<_>>();
    let table = |v: &[(usize, f64)]| {
        v.iter().map(|&(i, accuracy)| FeatureAccuracy { feature: name(i), index: i, accuracy }).collect::<Vec<_>>()
    };

    let baseline = ctx.accuracy(&set)?;
    let removal = removal_scan(ctx, &set)?;
    let (kept, removed) = prune(&removal, baseline);
    let kept_accuracy = if removed.is_empty() { baseline } else { ctx.accuracy(&kept)? };
    let (readd, cumulative) = if removed.is_empty() {
        (vec![], CumulativeResult { path: vec![], final_set: kept.clone(), final_accuracy: kept_accuracy })
    } else {
        let readd = readd_scan(ctx, &kept, &removed)?;
        let cumulative = cumulative_add(ctx, &kept, kept_accuracy, &gain_order(&readd))?;
        (readd, cumulative)
    };
    Ok(SelectionTrace {
        model: ctx.spec.clone(),
        evaluator: ctx.evaluator,
        seed: ctx.seed,
        full_set: names(&set),
        baseline_accuracy: baseline,
        removal: table(&removal),
        kept: names(&kept),
        removed: names(&removed),
        kept_accuracy,
        readd: table(&readd),
        cumulative: cumulative
            .path
            .iter()
            .map(|s| TraceStep { feature: name(s.feature), index: s.feature, accuracy: s.accuracy, accepted: s.accepted })
            .collect(),
        final_set: names(&cumulative.final_set),
        final_accuracy: cumulative.final_accuracy,
    })
}

impl SelectionTrace {
    /// Flat `stage,feature,accuracy,accepted` table covering every scan.
    pub fn write_tables_csv<W: Write>(&self, sink: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(sink);
        w.write_record(["stage", "feature", "accuracy", "accepted"])?;
        w.write_record(["baseline", "", &self.baseline_accuracy.to_string(), ""])?;
        for r in &self.removal {
            let kept = self.kept.contains(&r.feature);
            w.write_record(["removal", &r.feature, &r.accuracy.to_string(), &kept.to_string()])?;
        }
        w.write_record(["kept", "", &self.kept_accuracy.to_string(), ""])?;
        for r in &self.readd {
            w.write_record(["readd", &r.feature, &r.accuracy.to_string(), ""])?;
        }
        for s in &self.cumulative {
            w.write_record(["cumulative", &s.feature, &s.accuracy.to_string(), &s.accepted.to_string()])?;
        }
        w.write_record(["final", &self.final_set.join(";"), &self.final_accuracy.to_string(), ""])?;
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prune_rule() {
        let (kept, removed) = prune(&[(0, 0.70), (1, 0.76), (2, 0.74)], 0.74);
        assert_eq!(kept, vec![0]);
        assert_eq!(removed, vec![1, 2]);
    }

    #[test]
    fn gain_order_breaks_ties_by_index() {
        assert_eq!(gain_order(&[(4, 0.6), (1, 0.7), (2, 0.6)]), vec![1, 2, 4]);
    }
}
