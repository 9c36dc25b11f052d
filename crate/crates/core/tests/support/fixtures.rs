use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tennis_core::features::{Dataset, EntryMeta};
use tennis_core::Matrix;

/// Dataset whose rows `2k` and `2k + 1` form match `k`.
pub fn dataset(rows: Vec<Vec<f64>>, labels: Vec<u8>, odds: Vec<Option<f64>>) -> Dataset {
    let d = rows.first().map_or(0, Vec::len);
    let entries = (0..rows.len())
        .map(|i| EntryMeta { entry_id: i, match_id: i / 2, player: format!("p{i}"), odds: odds[i] })
        .collect();
    Dataset {
        feature_names: (0..d).map(|j| format!("f{j}")).collect(),
        matrix: Matrix::from_rows(&rows).unwrap(),
        labels,
        entries,
    }
}

pub fn uniform_rows(seed: u64, n: usize, d: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect()
}

/// Columns 0–2 informative (linear), 3–7 pure noise, 8–9 an XOR-style interacting pair.
/// Labels follow the informative sum plus the interaction, with a little label noise.
pub fn selection_fixture(seed: u64, n: usize) -> (Matrix, Vec<String>, Vec<u8>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let r: Vec<f64> = (0..10).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let inter = if (r[8] > 0.0) == (r[9] > 0.0) { 1.0 } else { -1.0 };
        let z = 2.0 * (r[0] + r[1] + r[2]) + inter + rng.gen_range(-0.3..0.3);
        y.push(u8::from(z > 0.0));
        rows.push(r);
    }
    let names = ["inf0", "inf1", "inf2", "noise0", "noise1", "noise2", "noise3", "noise4", "inter0", "inter1"]
        .map(String::from)
        .to_vec();
    (Matrix::from_rows(&rows).unwrap(), names, y)
}
