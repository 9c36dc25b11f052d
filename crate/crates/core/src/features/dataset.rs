use std::collections::HashMap;
use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::entry::{compute_entry, feature_names, PlayerMatchEntry, FEATURE_COUNT};
use super::history::PlayerHistory;
use crate::error::{Error, Result};
use crate::ingest::{MergedMatch, Side};
use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryMeta {
    pub entry_id: usize,
    pub match_id: usize,
    pub player: String,
    pub odds: Option<f64>,
}

/// Feature matrix (NaN = missing), labels and per-entry metadata, row-aligned.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub feature_names: Vec<String>,
    pub matrix: Matrix,
    pub labels: Vec<u8>,
    pub entries: Vec<EntryMeta>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.feature_names.iter().position(|n| n.eq_ignore_ascii_case(name.trim()))
    }

    /// Copy restricted to the named feature columns, in the given order.
    pub fn select_features(&self, names: &[String]) -> Result<Dataset> {
        let cols = names
            .iter()
            .map(|n| self.feature_index(n).ok_or_else(|| Error::InvalidArgument(format!("unknown feature `{n}`"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Dataset {
            feature_names: cols.iter().map(|&c| self.feature_names[c].clone()).collect(),
            matrix: self.matrix.select_cols(&cols),
            labels: self.labels.clone(),
            entries: self.entries.clone(),
        })
    }

    /// For each row, the row index of the other player in the same match.
    pub fn opponent_rows(&self) -> Vec<Option<usize>> {
        let mut by_match: HashMap<usize, Vec<usize>> = HashMap::new();
        for (i, e) in self.entries.iter().enumerate() {
            by_match.entry(e.match_id).or_default().push(i);
        }
        (0..self.len())
            .map(|i| match by_match[&self.entries[i].match_id].as_slice() {
                [a, b] if *a == i => Some(*b),
                [a, b] if *b == i => Some(*a),
                _ => None,
            })
            .collect()
    }

    /// (own odds, opponent odds) per row, when both are known.
    pub fn odds_pairs(&self) -> Vec<Option<(f64, f64)>> {
        self.opponent_rows()
            .into_iter()
            .enumerate()
            .map(|(i, opp)| self.entries[i].odds.zip(opp.and_then(|j| self.entries[j].odds)))
            .collect()
    }

    pub fn write_csv<W: Write>(&self, sink: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(sink);
        let mut header: Vec<String> =
            ["entry_id", "match_id", "player", "label", "odds"].map(String::from).to_vec();
        header.extend(self.feature_names.iter().cloned());
        w.write_record(&header)?;
        for (i, e) in self.entries.iter().enumerate() {
            let mut row = vec![
                e.entry_id.to_string(),
                e.match_id.to_string(),
                e.player.clone(),
                self.labels[i].to_string(),
                e.odds.map(|o| o.to_string()).unwrap_or_default(),
            ];
            row.extend(self.matrix.row(i).iter().map(|v| if v.is_nan() { String::new() } else { v.to_string() }));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(source: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(source);
        let header: Vec<String> = rdr.headers()?.iter().map(String::from).collect();
        if header.len() < 5 || header[..5] != ["entry_id", "match_id", "player", "label", "odds"] {
            return Err(Error::Header("not a feature-matrix file (missing leading id columns)".into()));
        }
        let feature_names = header[5..].to_vec();
        let cols = feature_names.len();
        let (mut data, mut labels, mut entries) = (Vec::new(), Vec::new(), Vec::new());
        for rec in rdr.records() {
            let rec = rec?;
            let line = rec.position().map_or(0, |p| p.line());
            let bad = |what: &str, v: &str| Error::Data(format!("line {line}: invalid {what} `{v}`"));
            let num = |k: usize, what: &str| rec[k].parse::<usize>().map_err(|_| bad(what, &rec[k]));
            let label = match &rec[3] {
                "0" => 0,
                "1" => 1,
                v => return Err(bad("label", v)),
            };
            let odds = match &rec[4] {
                "" => None,
                v => Some(v.parse::<f64>().map_err(|_| bad("odds", v))?),
            };
            entries.push(EntryMeta {
                entry_id: num(0, "entry_id")?,
                match_id: num(1, "match_id")?,
                player: rec[2].to_string(),
                odds,
            });
            labels.push(label);
            for k in 5..5 + cols {
                data.push(match &rec[k] {
                    "" => f64::NAN,
                    v => v.parse::<f64>().map_err(|_| bad("feature value", v))?,
                });
            }
        }
        let matrix = Matrix::new(labels.len(), cols, data)?;
        Ok(Self { feature_names, matrix, labels, entries })
    }
}

/// Two entries per match, winner first; row `2k` and `2k+1` belong to match `k`.
pub fn assemble_entries(matches: &[MergedMatch], history: &PlayerHistory) -> Vec<PlayerMatchEntry> {
    (0..matches.len())
        .into_par_iter()
        .flat_map_iter(|k| [Side::Winner, Side::Loser].map(|side| compute_entry(matches, k, side, history)))
        .collect()
}

pub fn assemble_dataset(matches: &[MergedMatch], history: &PlayerHistory) -> Dataset {
    let entries = assemble_entries(matches, history);
    let mut data = Vec::with_capacity(entries.len() * FEATURE_COUNT);
    let mut labels = Vec::with_capacity(entries.len());
    let mut meta = Vec::with_capacity(entries.len());
    for (i, e) in entries.into_iter().enumerate() {
        data.extend_from_slice(&e.features);
        labels.push(e.label);
        meta.push(EntryMeta { entry_id: i, match_id: e.match_idx, player: e.player, odds: e.odds });
    }
    Dataset {
        feature_names: feature_names(),
        matrix: Matrix::new(labels.len(), FEATURE_COUNT, data).expect("row width is FEATURE_COUNT"),
        labels,
        entries: meta,
    }
}
