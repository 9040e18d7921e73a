//! Raw inputs to per-state daily datasets: news and incident parsers, daily
//! aggregation, label construction, dataset files, and a synthetic generator.

mod daily;
mod dataset;
mod incidents;
mod news;
mod registry;
pub mod states;
mod synth;

pub use daily::build_daily_features;
pub use dataset::{date_range, LocationDataset};
pub use incidents::{
    label_vector, parse_incidents, parse_incidents_from, unique_location_days, write_incidents, IncidentRecord,
    IncidentStats,
};
pub use news::{parse_news, parse_news_file, NewsFormat, NewsRecord, ParseStats};
pub use registry::{FeatureGroup, FeatureId, Registry, CAMEO_COUNT, FEATURE_COUNT, THEME_COUNT};
pub use synth::{state_order, synth_feature_ids, synth_generate, synth_incidents, Signal, SynthConfig};
