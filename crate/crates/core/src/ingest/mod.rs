//! Match and odds ingestion, odds merging and median imputation.

mod impute;
mod io;
mod merge;
mod parse;
mod records;

pub use impute::{impute_medians, median, MedianMap};
pub use io::{merged_header, read_merged, write_merged};
pub use merge::{average_odds, merge_odds, merge_odds_within, normalize_name, MergeStats};
pub use parse::{
    parse_matches, parse_odds, MatchColumns, MatchParse, OddsColumns, OddsParse, PlayerColumns, RowError,
};
pub use records::{parse_date, Hand, MatchRecord, MergedMatch, OddsRecord, PlayerLine, Round, Side, Surface};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourcedRowError {
    pub file: String,
    pub line: u64,
    pub message: String,
}

/// Counts of everything ingestion dropped, skipped or flagged.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QualityReport {
    pub match_rows_parsed: usize,
    pub odds_rows_parsed: usize,
    pub match_row_errors: Vec<SourcedRowError>,
    pub odds_row_errors: Vec<SourcedRowError>,
    pub inconsistent_serve_stats: usize,
    pub invalid_odds_pairs: usize,
    pub incomplete_odds_pairs: usize,
    pub merge: MergeStats,
    pub entries_with_odds: usize,
    pub entries_without_odds: usize,
}

impl QualityReport {
    pub fn add_matches(&mut self, file: &str, parse: &MatchParse) {
        self.match_rows_parsed += parse.records.len();
        self.inconsistent_serve_stats += parse.inconsistent_stats;
        self.match_row_errors.extend(parse.row_errors.iter().map(|e| SourcedRowError {
            file: file.to_string(),
            line: e.line,
            message: e.message.clone(),
        }));
    }

    pub fn add_odds(&mut self, file: &str, parse: &OddsParse) {
        self.odds_rows_parsed += parse.records.len();
        self.invalid_odds_pairs += parse.invalid_pairs;
        self.incomplete_odds_pairs += parse.incomplete_pairs;
        self.odds_row_errors.extend(parse.row_errors.iter().map(|e| SourcedRowError {
            file: file.to_string(),
            line: e.line,
            message: e.message.clone(),
        }));
    }

    pub fn set_merge(&mut self, stats: MergeStats) {
        self.entries_with_odds = stats.entries_with_odds();
        self.entries_without_odds = stats.entries_without_odds();
        self.merge = stats;
    }
}
