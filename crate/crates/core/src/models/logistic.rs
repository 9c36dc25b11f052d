//! L2-regularised logistic regression fitted by full-batch gradient descent.
//!
//! The objective on standardized features is mean log-loss plus `λ/2·‖w‖²`; the bias
//! is not penalised.
//! The step size starts at `learning_rate`, halves until the Armijo condition holds and
//! grows by 1.5 after each accepted step.

use serde::{Deserialize, Serialize};

use super::standardize::Standardizer;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LogisticParams {
    pub l2_lambda: f64,
    /// Initial step size.
    pub learning_rate: f64,
    pub max_iters: usize,
    /// Stop once the gradient's max-norm is at or below this.
    pub tol: f64,
}

impl Default for LogisticParams {
    fn default() -> Self {
        Self { l2_lambda: 1e-3, learning_rate: 1.0, max_iters: 5000, tol: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub scaler: Standardizer,
    pub iterations: usize,
    pub converged: bool,
}

pub fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^t)` without overflow.
fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

fn margin(row: &[f64], w: &[f64], b: f64) -> f64 {
    row.iter().zip(w).map(|(x, w)| x * w).sum::<f64>() + b
}

/// Regularised mean log-loss.
pub fn objective(z: &Matrix, y: &[u8], w: &[f64], b: f64, lambda: f64) -> f64 {
    let n = z.n_rows() as f64;
    let loss: f64 = z
        .rows_iter()
        .zip(y)
        .map(|(row, &yi)| {
            let s = margin(row, w, b);
            // -[y ln σ(s) + (1-y) ln(1-σ(s))] = softplus(s) - y s
            softplus(s) - f64::from(yi) * s
        })
        .sum();
    loss / n + 0.5 * lambda * w.iter().map(|v| v * v).sum::<f64>()
}

/// Gradient of [`objective`] with respect to (weights, bias).
pub fn gradient(z: &Matrix, y: &[u8], w: &[f64], b: f64, lambda: f64) -> (Vec<f64>, f64) {
    let n = z.n_rows() as f64;
    let mut gw = vec![0.0; w.len()];
    let mut gb = 0.0;
    for (row, &yi) in z.rows_iter().zip(y) {
        let r = sigmoid(margin(row, w, b)) - f64::from(yi);
        gb += r;
        for (g, x) in gw.iter_mut().zip(row) {
            *g += r * x;
        }
    }
    for (g, wk) in gw.iter_mut().zip(w) {
        *g = *g / n + lambda * wk;
    }
    (gw, gb / n)
}

pub fn train_logistic(x: &Matrix, y: &[u8], params: &LogisticParams) -> Result<LogisticModel> {
    if x.n_rows() == 0 {
        return Err(Error::InvalidArgument("cannot train logistic regression on zero rows".into()));
    }
    if y.len() != x.n_rows() {
        return Err(Error::Dimension { expected: x.n_rows(), got: y.len() });
    }
    let scaler = Standardizer::fit(x);
    let z = scaler.transform(x);
    let lambda = params.l2_lambda;
    let mut w = vec![0.0; x.n_cols()];
    // start the bias at the logit of the base rate, clamped so its gradient is below tol
    let eps = params.tol.clamp(f64::MIN_POSITIVE, 1.0) / 2.0;
    let base = (y.iter().map(|&l| f64::from(l)).sum::<f64>() / y.len() as f64).clamp(eps, 1.0 - eps);
    let mut b = (base / (1.0 - base)).ln();
    let mut f = objective(&z, y, &w, b, lambda);
    let mut step = params.learning_rate;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < params.max_iters {
        let (gw, gb) = gradient(&z, y, &w, b, lambda);
        let gmax = gw.iter().fold(gb.abs(), |m, g| m.max(g.abs()));
        if gmax <= params.tol {
            converged = true;
            break;
        }
        let gsq: f64 = gw.iter().map(|g| g * g).sum::<f64>() + gb * gb;
        loop {
            let w_new: Vec<f64> = w.iter().zip(&gw).map(|(wk, g)| wk - step * g).collect();
            let b_new = b - step * gb;
            let f_new = objective(&z, y, &w_new, b_new, lambda);
            if !f_new.is_finite() {
                return Err(Error::Training(format!("non-finite logistic loss at iteration {iterations}")));
            }
            if f_new <= f - 0.5 * step * gsq {
                w = w_new;
                b = b_new;
                f = f_new;
                step *= 1.5;
                break;
            }
            step *= 0.5;
            if step < 1e-20 {
                // no descent possible at machine precision: treat as converged
                return Ok(LogisticModel { weights: w, bias: b, scaler, iterations, converged: true });
            }
        }
        iterations += 1;
    }
    Ok(LogisticModel { weights: w, bias: b, scaler, iterations, converged })
}

impl LogisticModel {
    pub fn predict_proba(&self, row: &[f64]) -> f64 {
        let s: f64 = row
            .iter()
            .enumerate()
            .map(|(k, v)| (v - self.scaler.mean[k]) / self.scaler.scale[k] * self.weights[k])
            .sum();
        sigmoid(s + self.bias)
    }
}
