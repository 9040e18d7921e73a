//! Leakage-purged temporal cross-validation and reporting.

mod cv;
mod folds;
mod report;
mod spec;

pub use cv::{run_cv, run_cv_input, state_key, task_seed, CvInput, Supplements};
pub use folds::{candidate_training_days, check_window_separation, make_folds, purge_rows, Fold};
pub use report::{conventions, fingerprint, EvalReport, FoldResult, FoldStat, FoldSummary, Prediction};
pub use spec::{CvConfig, ModelSpec, WindowSpec};
