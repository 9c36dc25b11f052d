//! Per-player, per-match features computed only from strictly earlier matches.

mod dataset;
mod entry;
mod history;

pub use dataset::{assemble_dataset, assemble_entries, Dataset, EntryMeta};
pub use entry::{compute_entry, feature_names, Feature, PlayerMatchEntry, FEATURE_COUNT, RECENT};
pub use history::{HistoryEvent, PlayerHistory, Window};

use crate::ingest::MergedMatch;

/// Build the history index and assemble the dataset in one call.
pub fn featurize(matches: &[MergedMatch]) -> Dataset {
    let history = PlayerHistory::build(matches);
    assemble_dataset(matches, &history)
}
