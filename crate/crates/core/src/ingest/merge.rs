use std::collections::hash_map::Entry;
use std::collections::{HashMap, HashSet};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::records::{MatchRecord, MergedMatch, OddsRecord};

/// Join-key form of a player name: case-folded, trimmed, internal whitespace
/// collapsed to single spaces, periods removed.
///
/// `"Federer R."` and `" federer   r"` both become `"federer r"`.
pub fn normalize_name(name: &str) -> String {
    name.split_whitespace()
        .map(|tok| tok.replace('.', "").to_lowercase())
        .filter(|tok| !tok.is_empty())
        .collect::<Vec<_>>()
        .join(" ")
}

type JoinKey = (NaiveDate, String, String);

fn key(date: NaiveDate, winner: &str, loser: &str) -> JoinKey {
    (date, normalize_name(winner), normalize_name(loser))
}

/// Mean of the retained bookmaker pairs, independently per side.
pub fn average_odds(record: &OddsRecord) -> Option<(f64, f64)> {
    if record.pairs.is_empty() {
        return None;
    }
    let n = record.pairs.len() as f64;
    let (w, l) = record.pairs.iter().fold((0.0, 0.0), |(a, b), &(w, l)| (a + w, b + l));
    Some((w / n, l / n))
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeStats {
    pub matched: usize,
    pub unmatched: usize,
    /// Odds rows whose key repeated an earlier odds row; the earlier one was used.
    pub duplicate_odds_keys: usize,
    /// Matches whose key repeated an earlier match (same players, same day); only the
    /// first receives odds.
    pub duplicate_match_keys: usize,
    /// Odds rows that matched a key but had no valid bookmaker pair.
    pub odds_without_pairs: usize,
}

impl MergeStats {
    /// Player entries (two per match) that carry odds.
    pub fn entries_with_odds(&self) -> usize {
        2 * self.matched
    }

    pub fn entries_without_odds(&self) -> usize {
        2 * self.unmatched
    }
}

/// Attach averaged odds to matches by (date, normalized winner, normalized loser).
/// Output order equals `matches` order.
pub fn merge_odds(matches: Vec<MatchRecord>, odds: &[OddsRecord]) -> (Vec<MergedMatch>, MergeStats) {
    merge_odds_within(matches, odds, 0)
}

/// As [`merge_odds`], but an odds row dated up to `window_days` after the match date also
/// matches (match files often carry the tournament start date, odds files the match day).
/// Each odds row is used at most once; the earliest unused row in the window is taken.
pub fn merge_odds_within(
    matches: Vec<MatchRecord>,
    odds: &[OddsRecord],
    window_days: u32,
) -> (Vec<MergedMatch>, MergeStats) {
    let mut stats = MergeStats::default();
    let mut first: HashMap<JoinKey, usize> = HashMap::with_capacity(odds.len());
    let mut by_pair: HashMap<(String, String), Vec<(NaiveDate, usize)>> = HashMap::new();
    for (i, o) in odds.iter().enumerate() {
        let k = key(o.date, &o.winner_name, &o.loser_name);
        match first.entry(k) {
            Entry::Occupied(_) => stats.duplicate_odds_keys += 1,
            Entry::Vacant(v) => {
                by_pair.entry((v.key().1.clone(), v.key().2.clone())).or_default().push((o.date, i));
                v.insert(i);
            }
        }
    }
    for rows in by_pair.values_mut() {
        rows.sort();
    }

    let mut used = vec![false; odds.len()];
    let mut seen: HashSet<JoinKey> = HashSet::with_capacity(matches.len());
    let merged = matches
        .into_iter()
        .map(|record| {
            let k = key(record.date, &record.winner.name, &record.loser.name);
            if !seen.insert(k.clone()) {
                stats.duplicate_match_keys += 1;
            }
            let last = record.date + chrono::Days::new(u64::from(window_days));
            let hit = by_pair.get(&(k.1, k.2)).and_then(|rows| {
                rows.iter().find(|&&(d, i)| d >= record.date && d <= last && !used[i]).map(|&(_, i)| i)
            });
            let odds = hit.and_then(|i| {
                used[i] = true;
                let avg = average_odds(&odds[i]);
                if avg.is_none() {
                    stats.odds_without_pairs += 1;
                }
                avg
            });
            if odds.is_some() {
                stats.matched += 1;
            } else {
                stats.unmatched += 1;
            }
            MergedMatch { record, odds }
        })
        .collect();
    (merged, stats)
}
