//! Event forecasting from localized daily news features.
//!
//! The crate is organised bottom-up:
//!
//! * [`ingest`] turns news-record and incident-record files (or a synthetic
//!   generator) into one [`LocationDataset`] per state.
//! * [`features`] builds model inputs: fixed and K-S moving averages, stacked
//!   windows, min-max scaling, and prediction-window coarsening.
//! * [`stats`] holds the statistical primitives (K-S, rank statistics,
//!   Kruskal-Wallis, hierarchical clustering, AUROC/AUPRC).
//! * [`ensemble`] and [`neural`] are the learners.
//! * [`eval`] runs leakage-purged temporal cross-validation.

pub mod ensemble;
pub mod error;
pub mod eval;
pub mod features;
pub mod ingest;
pub mod neural;
pub mod persist;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
pub use ingest::{FeatureGroup, FeatureId, LocationDataset};
