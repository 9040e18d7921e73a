use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ensemble::{BoostConfig, ForestConfig, SmoteConfig};
use crate::error::{Error, Result};
use crate::neural::{Architecture, Cell, OptimizerConfig};
use crate::stats::ApConvention;

/// How each day is represented from its history.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowSpec {
    /// Moving average over `Δt` days.
    Fixed(usize),
    /// Per-feature moving average with windows fitted up to `Δt*`.
    Ks(usize),
    /// The previous `Δt` days side by side.
    Stacked(usize),
}

impl WindowSpec {
    pub fn days(self) -> usize {
        match self {
            WindowSpec::Fixed(d) | WindowSpec::Ks(d) | WindowSpec::Stacked(d) => d,
        }
    }

    /// Purge width: the longest window that can be in force.
    pub fn width(self) -> usize {
        self.days()
    }

    /// Days per model instance.
    pub fn depth(self) -> usize {
        match self {
            WindowSpec::Stacked(d) => d,
            _ => 1,
        }
    }

    pub fn validate(self) -> Result<()> {
        if self.days() == 0 {
            return Err(Error::invalid("window length must be at least 1"));
        }
        Ok(())
    }
}

impl fmt::Display for WindowSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WindowSpec::Fixed(d) => write!(f, "fixed:{d}"),
            WindowSpec::Ks(d) => write!(f, "ks:{d}"),
            WindowSpec::Stacked(d) => write!(f, "stacked:{d}"),
        }
    }
}

impl FromStr for WindowSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, days) =
            s.split_once(':').ok_or_else(|| Error::invalid(format!("window `{s}`: expected kind:days")))?;
        let d: usize = days.trim().parse().map_err(|_| Error::invalid(format!("window `{s}`: bad day count")))?;
        let w = match kind.trim() {
            "fixed" => WindowSpec::Fixed(d),
            "ks" => WindowSpec::Ks(d),
            "stacked" => WindowSpec::Stacked(d),
            other => return Err(Error::invalid(format!("unknown window kind `{other}`"))),
        };
        w.validate()?;
        Ok(w)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelSpec {
    /// Constant score; AUROC is exactly 0.5.
    Random,
    Forest(ForestConfig),
    Boost(BoostConfig),
    Net {
        arch: Architecture,
        optimizer: OptimizerConfig,
    },
}

impl ModelSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::Random => "Random",
            ModelSpec::Forest(_) => "RF",
            ModelSpec::Boost(_) => "AdaBoost",
            ModelSpec::Net { arch: Architecture::Ffnn1 { .. }, .. } => "FFNN L=1",
            ModelSpec::Net { arch: Architecture::Ffnn2 { .. }, .. } => "FFNN L=2",
            ModelSpec::Net { arch: Architecture::Recurrent { cell: Cell::Gated, .. }, .. } => "LSTM",
            ModelSpec::Net { arch: Architecture::Recurrent { cell: Cell::Simple, .. }, .. } => "RNN",
        }
    }

    /// Ensembles train on SMOTE-balanced rows; networks use weighted loss.
    pub fn uses_smote(&self) -> bool {
        matches!(self, ModelSpec::Forest(_) | ModelSpec::Boost(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvConfig {
    pub folds: usize,
    pub repeats: usize,
    pub seed: u64,
    pub smote: SmoteConfig,
    pub ap_convention: ApConvention,
}

impl Default for CvConfig {
    fn default() -> Self {
        Self { folds: 5, repeats: 10, seed: 0, smote: SmoteConfig::default(), ap_convention: ApConvention::TiedBlocks }
    }
}
