//! Day-level representations built from a location's daily feature matrix.

mod ks;
mod prediction;
mod scale;
mod window;

pub use ks::{candidate_p_values, ks_fit, ks_fit_segments, ks_transform, FitSegment, FittedWindows};
pub use prediction::{aggregate_dataset, aggregate_dates, propagate_dataset, propagate_labels};
pub use scale::MinMaxScaler;
pub use window::{moving_average, moving_average_matrix, per_feature_moving_average, stack, Representation};
