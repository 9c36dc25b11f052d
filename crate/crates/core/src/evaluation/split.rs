use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed};

fn shuffled(n: usize, seed: u64, tag: &str) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng_from_seed(derive_seed(seed, tag, 0)));
    idx
}

/// Seeded shuffle of `0..n` cut into `k` contiguous chunks; the first `n % k` folds get one
/// extra row. Each fold is returned sorted.
pub fn kfold_split(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 folds, got {k}")));
    }
    if n < k {
        return Err(Error::InvalidArgument(format!("cannot split {n} rows into {k} folds")));
    }
    let idx = shuffled(n, seed, "kfold");
    let (base, extra) = (n / k, n % k);
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let len = base + usize::from(f < extra);
        let mut fold = idx[start..start + len].to_vec();
        fold.sort_unstable();
        folds.push(fold);
        start += len;
    }
    Ok(folds)
}

/// `(train, test)` with `|test| = round(fraction · n)`, both sorted.
pub fn holdout_split(n: usize, fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidArgument(format!("holdout fraction must be in (0, 1), got {fraction}")));
    }
    let n_test = (fraction * n as f64).round() as usize;
    if n_test == 0 || n_test >= n {
        return Err(Error::InvalidArgument(format!(
            "holdout fraction {fraction} of {n} rows leaves an empty train or test set"
        )));
    }
    let idx = shuffled(n, seed, "holdout");
    let mut test = idx[..n_test].to_vec();
    let mut train = idx[n_test..].to_vec();
    test.sort_unstable();
    train.sort_unstable();
    Ok((train, test))
}

/// For each row, the fold that holds it out.
pub fn fold_of(folds: &[Vec<usize>], n: usize) -> Vec<usize> {
    let mut of = vec![0; n];
    for (f, rows) in folds.iter().enumerate() {
        for &r in rows {
            of[r] = f;
        }
    }
    of
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ten_singletons() {
        let folds = kfold_split(10, 10, 3).unwrap();
        assert!(folds.iter().all(|f| f.len() == 1));
    }

    #[test]
    fn large_corpus_fold_sizes() {
        let sizes: Vec<usize> = kfold_split(49_188, 10, 0).unwrap().iter().map(Vec::len).collect();
        assert_eq!(sizes.iter().filter(|&&s| s == 4_919).count(), 8);
        assert_eq!(sizes.iter().filter(|&&s| s == 4_918).count(), 2);
    }

    #[test]
    fn holdout_sizes() {
        let (tr, te) = holdout_split(10, 0.2, 1).unwrap();
        assert_eq!((tr.len(), te.len()), (8, 2));
        let (tr, te) = holdout_split(49_188, 0.2, 1).unwrap();
        assert_eq!((tr.len(), te.len()), (39_350, 9_838));
        assert_eq!(holdout_split(10, 0.2, 1).unwrap(), holdout_split(10, 0.2, 1).unwrap());
        assert!(holdout_split(3, 0.1, 0).is_err());
        assert!(holdout_split(10, 1.0, 0).is_err());
    }

    #[test]
    fn errors() {
        assert!(kfold_split(3, 4, 0).is_err());
        assert!(kfold_split(10, 1, 0).is_err());
    }

    proptest! {
        #[test]
        fn folds_partition(n in 2usize..300, k in 2usize..12, seed: u64) {
            prop_assume!(n >= k);
            let folds = kfold_split(n, k, seed).unwrap();
            prop_assert_eq!(folds.len(), k);
            let mut all: Vec<usize> = folds.iter().flatten().copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
            let max = folds.iter().map(Vec::len).max().unwrap();
            let min = folds.iter().map(Vec::len).min().unwrap();
            prop_assert!(max - min <= 1);
            prop_assert_eq!(folds, kfold_split(n, k, seed).unwrap());
        }
    }
}
