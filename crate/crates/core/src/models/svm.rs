//! RBF-kernel support vector classifier.
//!
//! The dual `min ½αᵀQα − eᵀα, 0 ≤ α ≤ C, yᵀα = 0` with `Q_ij = y_i y_j k(x_i, x_j)` is
//! solved by sequential minimal optimization using the maximal-violating-pair /
//! second-order working-set rule. Probabilities come from a Platt sigmoid fitted on
//! out-of-fold decision values.

use std::collections::VecDeque;
use std::rc::Rc;

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::standardize::Standardizer;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::{derive_seed, rng_from_seed};

const TAU: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmParams {
    pub c: f64,
    /// Kernel bandwidth; `None` means `1 / n_features`.
    pub gamma: Option<f64>,
    /// Stopping tolerance on the KKT gap `m(α) − M(α)`.
    pub tol: f64,
    /// Iteration budget in units of the training-set size.
    pub max_passes: usize,
    /// Train on a seeded random subset of at most this many rows (SMO cost is quadratic).
    pub max_train_rows: Option<usize>,
    /// Folds used to produce out-of-fold decision values for Platt scaling.
    pub platt_folds: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self { c: 1.0, gamma: None, tol: 1e-3, max_passes: 100, max_train_rows: Some(10_000), platt_folds: 3 }
    }
}

impl SvmParams {
    pub fn gamma_for(&self, n_features: usize) -> f64 {
        self.gamma.unwrap_or(1.0 / n_features.max(1) as f64)
    }
}

pub fn rbf(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (-gamma * d2).exp()
}

/// Bounded FIFO cache of kernel rows.
struct KernelRows<'a> {
    x: &'a Matrix,
    gamma: f64,
    rows: Vec<Option<Rc<[f64]>>>,
    order: VecDeque<usize>,
    capacity: usize,
}

impl<'a> KernelRows<'a> {
    fn new(x: &'a Matrix, gamma: f64) -> Self {
        let n = x.n_rows();
        // ~256 MB of cached rows
        let capacity = (32_000_000 / n.max(1)).clamp(2, n.max(2));
        Self { x, gamma, rows: vec![None; n], order: VecDeque::new(), capacity }
    }

    fn row(&mut self, i: usize) -> Rc<[f64]> {
        if let Some(r) = &self.rows[i] {
            return Rc::clone(r);
        }
        let xi = self.x.row(i);
        let r: Rc<[f64]> = self.x.rows_iter().map(|xt| rbf(xi, xt, self.gamma)).collect();
        if self.order.len() >= self.capacity {
            if let Some(old) = self.order.pop_front() {
                self.rows[old] = None;
            }
        }
        self.order.push_back(i);
        self.rows[i] = Some(Rc::clone(&r));
        r
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoSolution {
    pub alpha: Vec<f64>,
    /// Decision function is `Σ α_t y_t k(x_t, x) − rho`.
    pub rho: f64,
    pub iterations: usize,
    pub converged: bool,
    /// KKT gap at exit.
    pub gap: f64,
    /// Dual objective `eᵀα − ½αᵀQα` after each iteration, when tracing was requested.
    pub dual_trace: Vec<f64>,
}

fn in_up(y: f64, a: f64, c: f64) -> bool {
    (y > 0.0 && a < c) || (y < 0.0 && a > 0.0)
}

fn in_low(y: f64, a: f64, c: f64) -> bool {
    (y > 0.0 && a > 0.0) || (y < 0.0 && a < c)
}

/// Maximal violation `m(α) − M(α)` for gradient `grad = Qα − e`.
pub fn kkt_gap(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> f64 {
    let mut gmax = f64::NEG_INFINITY;
    let mut gmax2 = f64::NEG_INFINITY;
    for t in 0..alpha.len() {
        if in_up(y[t], alpha[t], c) {
            gmax = gmax.max(-y[t] * grad[t]);
        }
        if in_low(y[t], alpha[t], c) {
            gmax2 = gmax2.max(y[t] * grad[t]);
        }
    }
    gmax + gmax2
}

fn exact_gradient(k: &mut KernelRows, alpha: &[f64], y: &[f64]) -> Vec<f64> {
    let n = alpha.len();
    let mut g = vec![-1.0; n];
    for s in (0..n).filter(|&s| alpha[s] != 0.0) {
        let ks = k.row(s);
        for t in 0..n {
            g[t] += y[t] * y[s] * ks[t] * alpha[s];
        }
    }
    g
}

/// Solve the RBF dual on (already standardized) `x` with labels `y ∈ {−1, +1}`.
pub fn smo(x: &Matrix, y: &[f64], c: f64, gamma: f64, tol: f64, max_iter: usize, trace: bool) -> SmoSolution {
    let n = x.n_rows();
    let mut k = KernelRows::new(x, gamma);
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let mut dual_trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    let mut gap = f64::INFINITY;

    while iterations < max_iter {
        let mut gmax = f64::NEG_INFINITY;
        let mut i = usize::MAX;
        for t in 0..n {
            if in_up(y[t], alpha[t], c) && -y[t] * grad[t] > gmax {
                gmax = -y[t] * grad[t];
                i = t;
            }
        }
        let mut gmax2 = f64::NEG_INFINITY;
        let mut j = usize::MAX;
        if i != usize::MAX {
            let ki = k.row(i);
            let mut best = f64::INFINITY;
            for t in 0..n {
                if !in_low(y[t], alpha[t], c) {
                    continue;
                }
                let yg = y[t] * grad[t];
                gmax2 = gmax2.max(yg);
                let diff = gmax + yg;
                if diff > 0.0 {
                    let quad = 2.0 - 2.0 * ki[t];
                    let obj = -(diff * diff) / if quad > 0.0 { quad } else { TAU };
                    if obj < best {
                        best = obj;
                        j = t;
                    }
                }
            }
        }
        gap = gmax + gmax2;
        if gap < tol || j == usize::MAX {
            // confirm against a freshly recomputed gradient before accepting
            grad = exact_gradient(&mut k, &alpha, y);
            gap = kkt_gap(&alpha, &grad, y, c);
            if gap < tol || j == usize::MAX {
                converged = true;
                break;
            }
            continue;
        }

        let (ki, kj) = (k.row(i), k.row(j));
        let (old_i, old_j) = (alpha[i], alpha[j]);
        let quad = {
            let q = 2.0 - 2.0 * ki[j];
            if q > 0.0 {
                q
            } else {
                TAU
            }
        };
        if y[i] != y[j] {
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..n {
            grad[t] += y[t] * (y[i] * ki[t] * di + y[j] * kj[t] * dj);
        }
        iterations += 1;
        if trace {
            // f(α) = ½ Σ α_t (G_t − 1); the dual objective is −f
            let f: f64 = alpha.iter().zip(&grad).map(|(a, g)| a * (g - 1.0)).sum::<f64>() / 2.0;
            dual_trace.push(-f);
        }
    }

    let (mut ub, mut lb, mut free, mut sum_free) = (f64::INFINITY, f64::NEG_INFINITY, 0usize, 0.0);
    for t in 0..n {
        let yg = y[t] * grad[t];
        let at_upper = alpha[t] >= c;
        let at_lower = alpha[t] <= 0.0;
        if at_upper {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if at_lower {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            sum_free += yg;
        }
    }
    let rho = if free > 0 { sum_free / free as f64 } else { (ub + lb) / 2.0 };
    SmoSolution { alpha, rho, iterations, converged, gap, dual_trace }
}

/// Platt sigmoid `p = 1 / (1 + exp(A·f + B))` fitted by Newton's method with backtracking
/// on smoothed targets.
pub fn fit_platt(decision: &[f64], positive: &[bool]) -> (f64, f64) {
    let prior1 = positive.iter().filter(|&&p| p).count() as f64;
    let prior0 = positive.len() as f64 - prior1;
    let hi = (prior1 + 1.0) / (prior1 + 2.0);
    let lo = 1.0 / (prior0 + 2.0);
    let t: Vec<f64> = positive.iter().map(|&p| if p { hi } else { lo }).collect();
    let nll = |a: f64, b: f64| -> f64 {
        decision
            .iter()
            .zip(&t)
            .map(|(&f, &ti)| {
                let z = f * a + b;
                if z >= 0.0 {
                    ti * z + (-z).exp().ln_1p()
                } else {
                    (ti - 1.0) * z + z.exp().ln_1p()
                }
            })
            .sum()
    };
    let (mut a, mut b) = (0.0, ((prior0 + 1.0) / (prior1 + 1.0)).ln());
    let mut fval = nll(a, b);
    for _ in 0..100 {
        let (mut h11, mut h22, mut h21, mut g1, mut g2) = (1e-12, 1e-12, 0.0, 0.0, 0.0);
        for (&f, &ti) in decision.iter().zip(&t) {
            let z = f * a + b;
            let (p, q) = if z >= 0.0 {
                let e = (-z).exp();
                (e / (1.0 + e), 1.0 / (1.0 + e))
            } else {
                let e = z.exp();
                (1.0 / (1.0 + e), e / (1.0 + e))
            };
            let d2 = p * q;
            h11 += f * f * d2;
            h22 += d2;
            h21 += f * d2;
            let d1 = ti - p;
            g1 += f * d1;
            g2 += d1;
        }
        if g1.abs() < 1e-5 && g2.abs() < 1e-5 {
            break;
        }
        let det = h11 * h22 - h21 * h21;
        let da = -(h22 * g1 - h21 * g2) / det;
        let db = -(-h21 * g1 + h11 * g2) / det;
        let gd = g1 * da + g2 * db;
        let mut step = 1.0;
        while step >= 1e-10 {
            let (na, nb) = (a + step * da, b + step * db);
            let nf = nll(na, nb);
            if nf < fval + 1e-4 * step * gd {
                a = na;
                b = nb;
                fval = nf;
                break;
            }
            step /= 2.0;
        }
        if step < 1e-10 {
            break;
        }
    }
    (a, b)
}

pub fn platt_probability(decision: f64, a: f64, b: f64) -> f64 {
    let z = decision * a + b;
    if z >= 0.0 {
        let e = (-z).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + z.exp())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    /// Standardized support vectors.
    pub support_vectors: Matrix,
    /// `α_t · y_t` per support vector, within [−C, C].
    pub dual_coef: Vec<f64>,
    pub bias: f64,
    pub gamma: f64,
    pub c: f64,
    pub platt_a: f64,
    pub platt_b: f64,
    pub scaler: Standardizer,
    pub converged: bool,
    pub iterations: usize,
    pub n_features: usize,
}

struct Fitted {
    sv: Matrix,
    coef: Vec<f64>,
    bias: f64,
    converged: bool,
    iterations: usize,
}

impl Fitted {
    fn decision(&self, z: &[f64], gamma: f64) -> f64 {
        self.sv.rows_iter().zip(&self.coef).map(|(s, c)| c * rbf(s, z, gamma)).sum::<f64>() + self.bias
    }
}

fn fit_dual(z: &Matrix, y: &[f64], params: &SvmParams, gamma: f64) -> Fitted {
    let pos = y.iter().filter(|&&v| v > 0.0).count();
    if pos == 0 || pos == y.len() {
        // one class: no dual problem, constant decision value of that class's sign
        return Fitted {
            sv: Matrix::zeros(0, z.n_cols()),
            coef: vec![],
            bias: if pos == 0 { -1.0 } else { 1.0 },
            converged: true,
            iterations: 0,
        };
    }
    let max_iter = params.max_passes.saturating_mul(z.n_rows()).max(1);
    let sol = smo(z, y, params.c, gamma, params.tol, max_iter, false);
    let idx: Vec<usize> = (0..y.len()).filter(|&t| sol.alpha[t] > 0.0).collect();
    Fitted {
        sv: z.select_rows(&idx),
        coef: idx.iter().map(|&t| sol.alpha[t] * y[t]).collect(),
        bias: -sol.rho,
        converged: sol.converged,
        iterations: sol.iterations,
    }
}

/// Train the RBF SVM and its Platt calibration.
pub fn train_svm_rbf(x: &Matrix, labels: &[u8], params: &SvmParams, seed: u64) -> Result<SvmModel> {
    if x.n_rows() == 0 {
        return Err(Error::InvalidArgument("cannot train an SVM on zero rows".into()));
    }
    if labels.len() != x.n_rows() {
        return Err(Error::Dimension { expected: x.n_rows(), got: labels.len() });
    }
    if !(params.c > 0.0) {
        return Err(Error::InvalidArgument(format!("SVM penalty C must be positive, got {}", params.c)));
    }
    let (x, labels): (Matrix, Vec<u8>) = match params.max_train_rows {
        Some(m) if m > 0 && x.n_rows() > m => {
            let mut rng = rng_from_seed(derive_seed(seed, "svm-subsample", 0));
            let mut idx = sample(&mut rng, x.n_rows(), m).into_vec();
            idx.sort_unstable();
            (x.select_rows(&idx), idx.iter().map(|&i| labels[i]).collect())
        }
        _ => (x.clone(), labels.to_vec()),
    };
    let gamma = params.gamma_for(x.n_cols());
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidArgument(format!("SVM gamma must be positive, got {gamma}")));
    }
    let scaler = Standardizer::fit(&x);
    let z = scaler.transform(&x);
    let y: Vec<f64> = labels.iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect();
    let n = z.n_rows();

    let fitted = fit_dual(&z, &y, params, gamma);

    // out-of-fold decision values for the calibration sigmoid
    let k = params.platt_folds.max(2);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng_from_seed(derive_seed(seed, "platt", 0)));
    let folds: Vec<&[usize]> = order.chunks(n.div_ceil(k).max(1)).collect();
    let fold_ok = n >= 2 * k
        && folds.iter().all(|f| {
            let pos = (0..n).filter(|i| !f.contains(i) && y[*i] > 0.0).count();
            pos > 0 && pos < n - f.len()
        });
    let decision: Vec<f64> = if fold_ok {
        let mut dec = vec![0.0; n];
        for f in &folds {
            let train: Vec<usize> = (0..n).filter(|i| !f.contains(i)).collect();
            let sub = fit_dual(&z.select_rows(&train), &train.iter().map(|&i| y[i]).collect::<Vec<_>>(), params, gamma);
            for &i in *f {
                dec[i] = sub.decision(z.row(i), gamma);
            }
        }
        dec
    } else {
        (0..n).map(|i| fitted.decision(z.row(i), gamma)).collect()
    };
    let positive: Vec<bool> = y.iter().map(|&v| v > 0.0).collect();
    let (platt_a, platt_b) = fit_platt(&decision, &positive);

    Ok(SvmModel {
        support_vectors: fitted.sv,
        dual_coef: fitted.coef,
        bias: fitted.bias,
        gamma,
        c: params.c,
        platt_a,
        platt_b,
        scaler,
        converged: fitted.converged,
        iterations: fitted.iterations,
        n_features: x.n_cols(),
    })
}

impl SvmModel {
    /// Raw decision value `Σ coef_t k(sv_t, z) + bias` for an unstandardized row.
    pub fn decision_value(&self, row: &[f64]) -> f64 {
        let mut z = vec![0.0; row.len()];
        self.scaler.transform_row(row, &mut z);
        self.support_vectors.rows_iter().zip(&self.dual_coef).map(|(s, c)| c * rbf(s, &z, self.gamma)).sum::<f64>()
            + self.bias
    }

    pub fn predict_proba(&self, row: &[f64]) -> f64 {
        platt_probability(self.decision_value(row), self.platt_a, self.platt_b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng as _;

    #[test]
    fn two_points_midpoint_boundary() {
        for c in [1.0, 10.0] {
            let x = Matrix::new(2, 1, vec![0.0, 4.0]).unwrap();
            let params = SvmParams { c, gamma: Some(0.5), ..Default::default() };
            let m = train_svm_rbf(&x, &[0, 1], &params, 0).unwrap();
            assert_eq!(m.dual_coef.len(), 2, "both points are support vectors");
            assert!(m.decision_value(&[2.0]).abs() < 1e-9);
            assert!(m.decision_value(&[0.0]) < 0.0 && m.decision_value(&[4.0]) > 0.0);
            // analytic: standardized points are ±1, k = exp(-0.5·4), α = 1/(1−k) clipped to C
            let k = (-2.0f64).exp();
            let alpha = (1.0 / (1.0 - k)).min(c);
            assert!((m.dual_coef[1] - alpha).abs() < 1e-9, "{:?}", m.dual_coef);
        }
    }

    #[test]
    fn dual_objective_non_decreasing_and_kkt() {
        let mut rng = rng_from_seed(11);
        let rows: Vec<Vec<f64>> = (0..120).map(|_| vec![rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)]).collect();
        let y: Vec<f64> = rows.iter().map(|r| if r[0] * r[1] + 0.3 * rng.gen_range(-1.0..1.0) > 0.0 { 1.0 } else { -1.0 }).collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let sol = smo(&x, &y, 1.0, 0.5, 1e-3, 100_000, true);
        assert!(sol.converged);
        assert!(sol.dual_trace.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        assert!(sol.alpha.iter().all(|&a| (0.0..=1.0).contains(&a)));
        let eq: f64 = sol.alpha.iter().zip(&y).map(|(a, y)| a * y).sum();
        assert!(eq.abs() < 1e-9);
    }

    #[test]
    fn platt_with_known_parameters() {
        assert_eq!(platt_probability(0.0, -1.0, 0.0), 0.5);
        assert!(platt_probability(5.0, -1.0, 0.0) > 0.99);
    }

    #[test]
    fn platt_fit_recovers_direction() {
        let dec: Vec<f64> = (0..40).map(|i| f64::from(i) / 10.0 - 2.0).collect();
        let pos: Vec<bool> = dec.iter().map(|&d| d > 0.0).collect();
        let (a, _) = fit_platt(&dec, &pos);
        assert!(a < 0.0);
    }

    #[test]
    fn vanishing_gamma_gives_base_rate() {
        let mut rng = rng_from_seed(2);
        let rows: Vec<Vec<f64>> = (0..60).map(|_| vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]).collect();
        let labels: Vec<u8> = (0..60).map(|i| u8::from(i % 3 == 0)).collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let m = train_svm_rbf(&x, &labels, &SvmParams { gamma: Some(1e-9), ..Default::default() }, 0).unwrap();
        let d0 = m.decision_value(x.row(0));
        for i in 0..60 {
            assert!((m.decision_value(x.row(i)) - d0).abs() < 1e-6);
            assert!((m.predict_proba(x.row(i)) - 1.0 / 3.0).abs() < 0.05);
        }
    }

    #[test]
    fn memorizes_separable_training_set() {
        let mut rng = rng_from_seed(5);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..80 {
            let l = (i % 2) as u8;
            let c = if l == 1 { 3.0 } else { -3.0 };
            rows.push(vec![c + rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]);
            labels.push(l);
        }
        let x = Matrix::from_rows(&rows).unwrap();
        let m = train_svm_rbf(&x, &labels, &SvmParams::default(), 0).unwrap();
        assert!(m.converged);
        for (i, &label) in labels.iter().enumerate() {
            assert_eq!(m.predict_proba(x.row(i)) > 0.5, label == 1);
        }
        assert!(m.dual_coef.iter().all(|c| c.abs() <= m.c));
    }

    #[test]
    fn single_class_is_handled() {
        let x = Matrix::new(8, 1, (0..8).map(f64::from).collect()).unwrap();
        let m = train_svm_rbf(&x, &[1; 8], &SvmParams::default(), 0).unwrap();
        assert!(m.predict_proba(&[3.0]) > 0.5);
    }
}
