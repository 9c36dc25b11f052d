use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Per-feature medians fitted on a row subset, reusable on later data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MedianMap {
    pub names: Vec<String>,
    pub medians: Vec<f64>,
}

impl MedianMap {
    /// Replace every NaN cell by its column median.
    pub fn apply(&self, table: &Matrix) -> Result<Matrix> {
        if table.n_cols() != self.medians.len() {
            return Err(Error::Dimension { expected: self.medians.len(), got: table.n_cols() });
        }
        let mut out = table.clone();
        for i in 0..out.n_rows() {
            for (v, &m) in out.row_mut(i).iter_mut().zip(&self.medians) {
                if v.is_nan() {
                    *v = m;
                }
            }
        }
        Ok(out)
    }
}

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_unstable_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 1 { values[n / 2] } else { (values[n / 2 - 1] + values[n / 2]) / 2.0 })
}

/// Fit medians on `fit_rows` only, then fill every missing (NaN) cell of the whole table.
pub fn impute_medians(table: &Matrix, names: &[String], fit_rows: &[usize]) -> Result<(Matrix, MedianMap)> {
    if fit_rows.is_empty() {
        return Err(Error::InvalidArgument("imputation needs at least one fit row".into()));
    }
    if names.len() != table.n_cols() {
        return Err(Error::Dimension { expected: table.n_cols(), got: names.len() });
    }
    let mut buf = Vec::with_capacity(fit_rows.len());
    let mut medians = Vec::with_capacity(table.n_cols());
    for (j, name) in names.iter().enumerate() {
        buf.clear();
        buf.extend(fit_rows.iter().map(|&i| table.get(i, j)).filter(|v| !v.is_nan()));
        medians.push(median(&mut buf).ok_or_else(|| Error::EmptyFeature(name.clone()))?);
    }
    let map = MedianMap { names: names.to_vec(), medians };
    let filled = map.apply(table)?;
    Ok((filled, map))
}
