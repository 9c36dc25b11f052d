//! Tennis match-outcome prediction pipeline.
//!
//! The crate is organised by pipeline stage:
//!
//! - [`ingest`]: parse match and bookmaker-odds files, merge them, impute missing values.
//! - [`features`]: point-in-time per-player features computed from strictly earlier matches.
//! - [`models`]: random forest, logistic regression and RBF-kernel SVM, all trained from scratch.
//! - [`evaluation`]: k-fold cross-validation, accuracy, the confidence-weighted score metric and
//!   the odds-comparison protocol.
//! - [`selection`]: wrapper feature selection (removal scan, pruning, re-addition).
//!
//! All randomness is derived from a single master seed through [`rng`].

pub mod error;
pub mod evaluation;
pub mod features;
pub mod ingest;
pub mod matrix;
pub mod models;
pub mod rng;
pub mod selection;
pub mod synthetic;

pub use error::{Error, Result};
pub use matrix::Matrix;
