//! Flat `key = value` experiment configuration.
//!
//! Lines are `key = value`; `#` starts a comment; blank lines are ignored.
//! Lists are comma separated. Ranges are written `a-b` (inclusive) or as a
//! list. Every key is optional; see [`ExperimentConfig::default`] and the
//! README for the full schema.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::NaiveDate;
use serde::Serialize;
use statecast::ingest::FeatureGroup;
use statecast::stats::ApConvention;
use thiserror::Error;

use crate::grid::{default_grid, Row, SweepRow};
use crate::profile::Profile;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{key}`: {reason}")]
    Value { key: String, reason: String },
}

fn bad(key: &str, reason: impl fmt::Display) -> ConfigError {
    ConfigError::Value { key: key.to_owned(), reason: reason.to_string() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalKind {
    None,
    Planted,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthSettings {
    pub days: usize,
    pub features: usize,
    pub states: usize,
    pub imbalance: f64,
    pub signal: SignalKind,
    pub window_len: usize,
    pub affected_fraction: f64,
    pub shift: f64,
    pub group: Option<FeatureGroup>,
    pub start: NaiveDate,
}

impl Default for SynthSettings {
    fn default() -> Self {
        Self {
            days: 800,
            features: 40,
            states: 5,
            imbalance: 0.02,
            signal: SignalKind::Planted,
            window_len: 7,
            affected_fraction: 0.25,
            shift: 3.0,
            group: None,
            start: NaiveDate::from_ymd_opt(2015, 2, 18).expect("valid date"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IngestSettings {
    #[serde(skip)]
    pub gkg: Vec<PathBuf>,
    #[serde(skip)]
    pub events: Vec<PathBuf>,
    #[serde(skip)]
    pub incidents: Option<PathBuf>,
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl Default for IngestSettings {
    fn default() -> Self {
        Self {
            gkg: Vec::new(),
            events: Vec::new(),
            incidents: None,
            start: NaiveDate::from_ymd_opt(2015, 2, 18).expect("valid date"),
            end: NaiveDate::from_ymd_opt(2018, 12, 31).expect("valid date"),
        }
    }
}

/// Model size overrides; unset values come from the profile.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SizeOverrides {
    pub rf_estimators: Option<usize>,
    pub ada_iterations: Option<usize>,
    pub net_hidden: Option<usize>,
    pub net_recurrent_hidden: Option<usize>,
    pub net_per_feature: Option<usize>,
    pub net_epochs: Option<usize>,
    pub net_learning_rate: Option<f64>,
    pub net_batch_size: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub states: Vec<String>,
    /// Dataset directory; defaults to `<out>/data`.
    #[serde(skip)]
    pub data: Option<PathBuf>,
    pub seed: u64,
    pub profile: Profile,
    pub folds: usize,
    pub repeats: usize,
    pub auprc: ApConvention,
    pub sizes: SizeOverrides,
    pub baseline_rows: Vec<Row>,
    /// Models for the analysis commands.
    pub models: Vec<Row>,
    pub sweep_models: Vec<SweepRow>,
    pub sweep_windows: Vec<usize>,
    pub pred_windows: Vec<usize>,
    pub corr_exclude: Option<String>,
    pub group_states: Vec<String>,
    pub group_thresholds: Vec<usize>,
    /// Group mode pools similar states until total positives exceed this.
    pub group_pool_threshold: usize,
    pub synth: SynthSettings,
    pub ingest: IngestSettings,
    #[serde(skip)]
    pub coarse_counts: Option<PathBuf>,
    pub coarse_basis: String,
    pub coarse_days: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            states: ["NY", "CA", "TX", "FL", "WA"].map(String::from).to_vec(),
            data: None,
            seed: 0,
            profile: Profile::Desk,
            folds: 5,
            repeats: 10,
            auprc: ApConvention::TiedBlocks,
            sizes: SizeOverrides::default(),
            baseline_rows: default_grid(),
            models: vec!["rf@ks:14".parse().expect("valid row"), "ffnn1@stacked:7".parse().expect("valid row")],
            sweep_models: vec!["rf@fixed".parse().expect("valid row"), "rf@ks".parse().expect("valid row")],
            sweep_windows: (1..=30).collect(),
            pred_windows: (1..=7).collect(),
            corr_exclude: Some("CA".into()),
            group_states: ["LA", "MO", "NV", "PA", "IN", "NC", "TN", "VA"].map(String::from).to_vec(),
            group_thresholds: (6..=16).collect(),
            group_pool_threshold: 12,
            synth: SynthSettings::default(),
            ingest: IngestSettings::default(),
            coarse_counts: None,
            coarse_basis: "incidents".into(),
            coarse_days: 1413,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    v.parse::<T>().map_err(|e| bad(key, e))
}

fn parse_list(v: &str) -> Vec<String> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect()
}

/// `a-b`, `a..=b` or `x,y,z`.
pub fn parse_range(key: &str, v: &str) -> Result<Vec<usize>, ConfigError> {
    let v = v.trim();
    let span = v.split_once("..=").or_else(|| v.split_once('-'));
    let out: Vec<usize> = match span {
        Some((a, b)) if !v.contains(',') => {
            let (a, b): (usize, usize) = (parse_num(key, a.trim())?, parse_num(key, b.trim())?);
            if a > b {
                return Err(bad(key, format!("empty range {a}-{b}")));
            }
            (a..=b).collect()
        }
        _ => parse_list(v).iter().map(|s| parse_num(key, s)).collect::<Result<_, _>>()?,
    };
    if out.is_empty() || out.contains(&0) {
        return Err(bad(key, "values must be positive and non-empty"));
    }
    Ok(out)
}

fn parse_states(key: &str, v: &str) -> Result<Vec<String>, ConfigError> {
    parse_list(v)
        .into_iter()
        .map(|s| {
            let up = s.to_ascii_uppercase();
            if statecast::ingest::states::is_state_code(&up) {
                Ok(up)
            } else {
                Err(bad(key, format!("`{s}` is not a state code")))
            }
        })
        .collect()
}

fn parse_group(key: &str, v: &str) -> Result<Option<FeatureGroup>, ConfigError> {
    if v.eq_ignore_ascii_case("none") || v.is_empty() {
        return Ok(None);
    }
    FeatureGroup::ALL.into_iter().find(|g| g.as_str() == v).map(Some).ok_or_else(|| {
        let names: Vec<&str> = FeatureGroup::ALL.iter().map(|g| g.as_str()).collect();
        bad(key, format!("unknown feature group `{v}` (expected one of {})", names.join(", ")))
    })
}

fn parse_date(key: &str, v: &str) -> Result<NaiveDate, ConfigError> {
    NaiveDate::parse_from_str(v, "%Y-%m-%d").map_err(|e| bad(key, e))
}

fn parse_paths(v: &str) -> Vec<PathBuf> {
    parse_list(v).into_iter().map(PathBuf::from).collect()
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
        let mut cfg = Self::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<(), ConfigError> {
        let rows = |v: &str| -> Result<Vec<Row>, ConfigError> {
            parse_list(v).iter().map(|s| s.parse().map_err(|e| bad(key, e))).collect()
        };
        match key {
            "states" => self.states = parse_states(key, v)?,
            "data" => self.data = Some(PathBuf::from(v)),
            "seed" => self.seed = parse_num(key, v)?,
            "profile" => self.profile = v.parse().map_err(|e| bad(key, e))?,
            "folds" => self.folds = parse_num(key, v)?,
            "repeats" => self.repeats = parse_num(key, v)?,
            "auprc" => {
                self.auprc = match v {
                    "tied_blocks" => ApConvention::TiedBlocks,
                    "stable_order" => ApConvention::StableOrder,
                    _ => return Err(bad(key, "expected tied_blocks or stable_order")),
                }
            }
            "rf.estimators" => self.sizes.rf_estimators = Some(parse_num(key, v)?),
            "ada.iterations" => self.sizes.ada_iterations = Some(parse_num(key, v)?),
            "net.hidden" => self.sizes.net_hidden = Some(parse_num(key, v)?),
            "net.recurrent_hidden" => self.sizes.net_recurrent_hidden = Some(parse_num(key, v)?),
            "net.per_feature" => self.sizes.net_per_feature = Some(parse_num(key, v)?),
            "net.epochs" => self.sizes.net_epochs = Some(parse_num(key, v)?),
            "net.learning_rate" => self.sizes.net_learning_rate = Some(parse_num(key, v)?),
            "net.batch_size" => self.sizes.net_batch_size = Some(parse_num(key, v)?),
            "baseline.rows" => self.baseline_rows = rows(v)?,
            "models" => self.models = rows(v)?,
            "sweep.models" => {
                self.sweep_models =
                    parse_list(v).iter().map(|s| s.parse().map_err(|e| bad(key, e))).collect::<Result<_, _>>()?
            }
            "sweep.windows" => self.sweep_windows = parse_range(key, v)?,
            "pred.windows" => self.pred_windows = parse_range(key, v)?,
            "corr.exclude" => {
                self.corr_exclude = if v.is_empty() || v == "none" { None } else { parse_states(key, v)?.pop() }
            }
            "group.states" => self.group_states = parse_states(key, v)?,
            "group.thresholds" => self.group_thresholds = parse_range(key, v)?,
            "group.pool_threshold" => self.group_pool_threshold = parse_num(key, v)?,
            "synth.days" => self.synth.days = parse_num(key, v)?,
            "synth.features" => self.synth.features = parse_num(key, v)?,
            "synth.states" => self.synth.states = parse_num(key, v)?,
            "synth.imbalance" => self.synth.imbalance = parse_num(key, v)?,
            "synth.signal" => {
                self.synth.signal = match v {
                    "none" => SignalKind::None,
                    "planted" => SignalKind::Planted,
                    _ => return Err(bad(key, "expected none or planted")),
                }
            }
            "synth.window_len" => self.synth.window_len = parse_num(key, v)?,
            "synth.affected_fraction" => self.synth.affected_fraction = parse_num(key, v)?,
            "synth.shift" => self.synth.shift = parse_num(key, v)?,
            "synth.group" => self.synth.group = parse_group(key, v)?,
            "synth.start" => self.synth.start = parse_date(key, v)?,
            "ingest.gkg" => self.ingest.gkg = parse_paths(v),
            "ingest.events" => self.ingest.events = parse_paths(v),
            "ingest.incidents" => self.ingest.incidents = Some(PathBuf::from(v)),
            "ingest.start" => self.ingest.start = parse_date(key, v)?,
            "ingest.end" => self.ingest.end = parse_date(key, v)?,
            "coarse.counts" => self.coarse_counts = Some(PathBuf::from(v)),
            "coarse.basis" => self.coarse_basis = v.to_owned(),
            "coarse.days" => self.coarse_days = parse_num(key, v)?,
            other => return Err(ConfigError::UnknownKey(other.to_owned())),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.states.is_empty() {
            return Err(bad("states", "at least one state is required"));
        }
        if self.folds < 2 {
            return Err(bad("folds", "at least two folds are required"));
        }
        if self.repeats == 0 {
            return Err(bad("repeats", "at least one repeat is required"));
        }
        if self.ingest.start > self.ingest.end {
            return Err(bad("ingest.start", "start is after end"));
        }
        Ok(())
    }

    pub fn data_dir(&self, out: &Path) -> PathBuf {
        self.data.clone().unwrap_or_else(|| out.join("data"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_text_with_comments() {
        let mut cfg = ExperimentConfig::default();
        cfg.apply_text(
            "# small run\nstates = ny, tx\nrepeats = 2   # quick\n\nsweep.windows = 1-3\npred.windows = 1,2,4\nsynth.group = cameo_count\nmodels = rf@fixed:1\n",
        )
        .unwrap();
        assert_eq!(cfg.states, ["NY", "TX"]);
        assert_eq!(cfg.repeats, 2);
        assert_eq!(cfg.sweep_windows, [1, 2, 3]);
        assert_eq!(cfg.pred_windows, [1, 2, 4]);
        assert_eq!(cfg.synth.group, Some(FeatureGroup::CameoCount));
        assert_eq!(cfg.models.len(), 1);
    }

    #[test]
    fn rejects_bad_input() {
        let mut cfg = ExperimentConfig::default();
        assert!(matches!(cfg.apply_text("nonsense"), Err(ConfigError::Syntax { line: 1 })));
        assert!(matches!(cfg.set("colour", "red"), Err(ConfigError::UnknownKey(_))));
        assert!(cfg.set("states", "NY,XX").is_err());
        assert!(cfg.set("sweep.windows", "5-2").is_err());
        assert!(cfg.set("sweep.windows", "0-2").is_err());
        assert!(cfg.set("models", "rf@sideways:3").is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("k", "6..=8").unwrap(), [6, 7, 8]);
        assert!(parse_range("k", "6..8").is_err());
        assert_eq!(parse_range("k", "7").unwrap(), [7]);
    }
}
