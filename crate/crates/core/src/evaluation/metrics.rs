use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Win probability implied by decimal odds. With `normalize`, the raw reciprocals of the
/// two sides are rescaled to sum to one; otherwise `1 / own` is returned.
pub fn implied_probability(own: f64, opponent: f64, normalize: bool) -> Result<f64> {
    for o in [own, opponent] {
        if !(o >= 1.0) || !o.is_finite() {
            return Err(Error::InvalidArgument(format!("decimal odds must be finite and at least 1.0, got {o}")));
        }
    }
    let r_own = 1.0 / own;
    if !normalize {
        return Ok(r_own);
    }
    let r_opp = 1.0 / opponent;
    Ok(r_own / (r_own + r_opp))
}

/// `w · (p − 0.5)` with `w = +1` for a win and `−1` for a loss.
pub fn score_entry(won: bool, p: f64) -> f64 {
    if won {
        p - 0.5
    } else {
        -(p - 0.5)
    }
}

/// Fixed-point units per score point used by [`total_score`].
pub const SCORE_UNITS: f64 = 1e12;

/// Sum of per-entry scores, accumulated in integer units of `1 / SCORE_UNITS` so the result
/// is independent of summation order (error at most `N / (2 · SCORE_UNITS)`).
pub fn total_score(scores: &[f64]) -> f64 {
    let units: i128 = scores.iter().map(|s| (s * SCORE_UNITS).round() as i128).sum();
    units as f64 / SCORE_UNITS
}

/// A prediction is correct iff `p > 0.5` and the player won, or `p < 0.5` and they lost.
/// `p = 0.5` is always counted incorrect.
pub fn is_correct(won: bool, p: f64) -> bool {
    if won {
        p > 0.5
    } else {
        p < 0.5
    }
}

pub fn accuracy(labels: &[u8], probs: &[f64]) -> f64 {
    if labels.is_empty() {
        return 0.0;
    }
    let hits = labels.iter().zip(probs).filter(|(&l, &p)| is_correct(l == 1, p)).count();
    hits as f64 / labels.len() as f64
}

pub const DEFAULT_BINS: usize = 20;

/// Equal-width bins over `[lo, hi]`, right-exclusive except the last.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn new(values: &[f64], bins: usize, lo: f64, hi: f64) -> Result<Self> {
        if bins == 0 || !(hi > lo) {
            return Err(Error::InvalidArgument(format!("bad histogram spec: {bins} bins over [{lo}, {hi}]")));
        }
        let mut counts = vec![0u64; bins];
        let width = (hi - lo) / bins as f64;
        for &v in values {
            if !(lo..=hi).contains(&v) {
                return Err(Error::InvalidArgument(format!("value {v} outside histogram range [{lo}, {hi}]")));
            }
            // values within rounding distance of an edge belong to the bin that edge opens
            let pos = (v - lo) / width + 1e-9;
            let b = (pos.floor() as usize).min(bins - 1);
            counts[b] += 1;
        }
        Ok(Self { lo, hi, counts })
    }

    pub fn scores(values: &[f64]) -> Result<Self> {
        Self::new(values, DEFAULT_BINS, -0.5, 0.5)
    }

    pub fn edges(&self) -> Vec<f64> {
        let n = self.counts.len();
        (0..=n).map(|i| self.lo + (self.hi - self.lo) * i as f64 / n as f64).collect()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}
