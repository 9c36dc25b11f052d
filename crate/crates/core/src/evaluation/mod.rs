//! Cross-validation, accuracy and score metrics, and the odds-comparison protocol.

pub mod cv;
pub mod metrics;
pub mod protocol;
pub mod split;

pub use cv::{cross_validate, cross_validate_with_folds, fit_predict, holdout_accuracy, CvResult};
pub use metrics::{accuracy, implied_probability, is_correct, score_entry, total_score, Histogram};
pub use protocol::{
    cv_report, odds_protocol, score_sources, Consistency, CvSummary, EntryRef, EvaluationReport, ProtocolOptions,
    ScoredEntry, Source, SourceSummary,
};
pub use split::{holdout_split, kfold_split};
