mod support;

use support::fixtures::{selection_fixture, uniform_rows};
use tennis_core::models::{ModelKind, ModelParams, ModelSpec};
use tennis_core::selection::{
    cumulative_add, gain_order, prune, readd_scan, removal_scan, run_selection, sequential_forward, Evaluator,
    SelectionContext,
};
use tennis_core::Matrix;

fn names(d: usize) -> Vec<String> {
    (0..d).map(|j| format!("f{j}")).collect()
}

fn logistic() -> ModelSpec {
    ModelSpec::new(ModelKind::Logistic, ModelParams::default())
}

fn forest() -> ModelSpec {
    ModelSpec::new(ModelKind::Forest, ModelParams::default())
}

fn ctx<'a>(spec: &'a ModelSpec, x: &'a Matrix, names: &'a [String], y: &'a [u8]) -> SelectionContext<'a> {
    SelectionContext { spec, x, names, y, evaluator: Evaluator::CrossValidation { folds: 5 }, seed: 11 }
}

#[test]
fn removal_separates_signal_from_noise() {
    let rows = uniform_rows(1, 200, 2);
    let y: Vec<u8> = rows.iter().map(|r| u8::from(r[0] > 0.0)).collect();
    let x = Matrix::from_rows(&rows).unwrap();
    let (spec, n) = (logistic(), names(2));
    let c = ctx(&spec, &x, &n, &y);
    let scan = removal_scan(&c, &[0, 1]).unwrap();
    assert_eq!(scan.len(), 2);
    let without_a = scan.iter().find(|s| s.0 == 0).unwrap().1;
    let without_b = scan.iter().find(|s| s.0 == 1).unwrap().1;
    assert!((without_a - 0.5).abs() < 0.12, "{without_a}");
    assert!(without_b > 0.97, "{without_b}");
}

#[test]
fn duplicated_feature_is_redundant() {
    let mut rows = uniform_rows(2, 200, 2);
    rows.iter_mut().for_each(|r| r[1] = r[0]);
    let y: Vec<u8> = rows.iter().map(|r| u8::from(r[0] > 0.1)).collect();
    let x = Matrix::from_rows(&rows).unwrap();
    let (spec, n) = (logistic(), names(2));
    let c = ctx(&spec, &x, &n, &y);
    let base = c.accuracy(&[0, 1]).unwrap();
    for (_, acc) in removal_scan(&c, &[0, 1]).unwrap() {
        assert!((acc - base).abs() < 0.02);
    }
}

#[test]
fn readd_restores_interacting_partner() {
    let rows = uniform_rows(3, 400, 3);
    let y: Vec<u8> = rows.iter().map(|r| u8::from((r[0] > 0.0) == (r[1] > 0.0))).collect();
    let x = Matrix::from_rows(&rows).unwrap();
    let (spec, n) = (forest(), names(3));
    let c = ctx(&spec, &x, &n, &y);
    let kept = [0, 2];
    let kept_acc = c.accuracy(&kept).unwrap();
    let readd = readd_scan(&c, &kept, &[1]).unwrap();
    assert_eq!(readd[0].1, c.accuracy(&[0, 1, 2]).unwrap());
    assert!(readd[0].1 > kept_acc + 0.2, "{kept_acc} -> {}", readd[0].1);
    assert!(readd_scan(&c, &kept, &[]).is_err());
}

#[test]
fn cumulative_stops_immediately_when_nothing_helps() {
    let rows = uniform_rows(4, 200, 4);
    let y: Vec<u8> = rows.iter().map(|r| u8::from(r[0] > 0.0)).collect();
    let x = Matrix::from_rows(&rows).unwrap();
    let (spec, n) = (logistic(), names(4));
    let c = ctx(&spec, &x, &n, &y);
    let kept_acc = c.accuracy(&[0]).unwrap();
    assert_eq!(kept_acc, 1.0);
    let readd = readd_scan(&c, &[0], &[1, 2, 3]).unwrap();
    let result = cumulative_add(&c, &[0], kept_acc, &gain_order(&readd)).unwrap();
    assert_eq!(result.final_set, vec![0]);
    assert_eq!(result.path.len(), 1);
    assert!(!result.path[0].accepted);
}

#[test]
fn cumulative_accepts_two_then_rejects() {
    // labels depend on a + b + c with a margin; kept = {a}, candidates b, c and noise d
    let rows: Vec<Vec<f64>> =
        uniform_rows(5, 900, 4).into_iter().filter(|r| (r[0] + r[1] + r[2]).abs() > 0.25).take(400).collect();
    let y: Vec<u8> = rows.iter().map(|r| u8::from(r[0] + r[1] + r[2] > 0.0)).collect();
    let x = Matrix::from_rows(&rows).unwrap();
    let (spec, n) = (logistic(), names(4));
    let c = ctx(&spec, &x, &n, &y);
    let kept_acc = c.accuracy(&[0]).unwrap();
    let readd = readd_scan(&c, &[0], &[1, 2, 3]).unwrap();
    let order = gain_order(&readd);
    assert_eq!(order[2], 3);
    let result = cumulative_add(&c, &[0], kept_acc, &order).unwrap();
    assert_eq!(result.path.len(), 3);
    assert!(result.path[0].accepted && result.path[1].accepted && !result.path[2].accepted);
    assert_eq!(result.final_set, vec![0, 1, 2]);
    assert!(result.path[1].accuracy > result.path[0].accuracy && result.path[0].accuracy > kept_acc);
}

#[test]
fn forward_curve_shape() {
    let rows = uniform_rows(6, 200, 3);
    let y: Vec<u8> = (0..200).map(|i| u8::from((i * 7919) % 13 < 6)).collect();
    let x = Matrix::from_rows(&rows).unwrap();
    let (spec, n) = (logistic(), names(3));
    let c = ctx(&spec, &x, &n, &y);
    let curve = sequential_forward(&c, &[2, 0, 1]).unwrap();
    assert_eq!(curve.len(), 3);
    assert_eq!(curve[2].1, c.accuracy(&[0, 1, 2]).unwrap());
    assert!(curve[0].1 < 0.65);
    assert!(sequential_forward(&c, &[]).is_err());
}

#[test]
fn full_trace_is_reproducible() {
    let (x, n, y) = selection_fixture(7, 300);
    let spec = logistic();
    let c = ctx(&spec, &x, &n, &y);
    let all: Vec<usize> = (0..10).collect();
    let a = run_selection(&c, &all).unwrap();
    let b = run_selection(&c, &all).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());

    // prune partitions the feature set
    let removal: Vec<(usize, f64)> = a.removal.iter().map(|r| (r.index, r.accuracy)).collect();
    let (kept, removed) = prune(&removal, a.baseline_accuracy);
    let mut union: Vec<usize> = kept.iter().chain(&removed).copied().collect();
    union.sort_unstable();
    assert_eq!(union, all);

    // every recorded accuracy comes from retraining the recorded subset
    let idx = |names: &[String]| names.iter().map(|s| n.iter().position(|m| m == s).unwrap()).collect::<Vec<_>>();
    assert_eq!(c.accuracy(&idx(&a.final_set)).unwrap(), a.final_accuracy);
    assert_eq!(c.accuracy(&idx(&a.kept)).unwrap(), a.kept_accuracy);
    let accepted: Vec<f64> = a.cumulative.iter().filter(|s| s.accepted).map(|s| s.accuracy).collect();
    assert!(accepted.windows(2).all(|w| w[1] > w[0]));
}
