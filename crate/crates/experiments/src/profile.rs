//! Size presets for models.

use std::fmt;
use std::str::FromStr;

use clap::ValueEnum;
use serde::Serialize;
use statecast::ensemble::{BoostConfig, ForestConfig};
use statecast::neural::{Architecture, Cell, NetProfile, OptimizerConfig};

use crate::config::SizeOverrides;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// Laptop-scale ensembles and networks.
    Desk,
    /// Ensemble sizes, widths and epochs of the original experiments.
    Paper,
}

impl Profile {
    fn net(self) -> NetProfile {
        match self {
            Profile::Desk => NetProfile::Desk,
            Profile::Paper => NetProfile::Paper,
        }
    }

    pub fn estimators(self) -> usize {
        match self {
            Profile::Desk => 300,
            Profile::Paper => 3000,
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Profile::Desk => "desk",
            Profile::Paper => "paper",
        })
    }
}

impl FromStr for Profile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "desk" => Ok(Profile::Desk),
            "paper" => Ok(Profile::Paper),
            other => Err(format!("unknown profile `{other}` (expected desk or paper)")),
        }
    }
}

/// Resolved model sizes: profile defaults with config overrides applied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sizes {
    pub rf_estimators: usize,
    pub ada_iterations: usize,
    pub hidden: usize,
    pub recurrent_hidden: usize,
    pub per_feature: usize,
    pub optimizer: OptimizerConfig,
}

impl Sizes {
    pub fn resolve(profile: Profile, o: &SizeOverrides) -> Self {
        let net = profile.net();
        let base = net.optimizer();
        Self {
            rf_estimators: o.rf_estimators.unwrap_or(profile.estimators()),
            ada_iterations: o.ada_iterations.unwrap_or(profile.estimators()),
            hidden: o.net_hidden.unwrap_or(net.hidden()),
            recurrent_hidden: o.net_recurrent_hidden.unwrap_or(net.recurrent_hidden()),
            per_feature: o.net_per_feature.unwrap_or(net.per_feature()),
            optimizer: OptimizerConfig {
                epochs: o.net_epochs.unwrap_or(base.epochs),
                learning_rate: o.net_learning_rate.unwrap_or(base.learning_rate),
                batch_size: o.net_batch_size.unwrap_or(base.batch_size),
                ..base
            },
        }
    }

    pub fn forest(&self) -> ForestConfig {
        ForestConfig::with_estimators(self.rf_estimators)
    }

    pub fn boost(&self) -> BoostConfig {
        BoostConfig { iterations: self.ada_iterations }
    }

    pub fn ffnn(&self, layers: u8) -> Architecture {
        if layers >= 2 {
            Architecture::Ffnn2 { hidden: self.hidden, per_feature: self.per_feature }
        } else {
            Architecture::Ffnn1 { hidden: self.hidden }
        }
    }

    pub fn recurrent(&self, cell: Cell) -> Architecture {
        Architecture::Recurrent { hidden: self.recurrent_hidden, cell }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn desk_never_uses_full_scale_widths() {
        let desk = Sizes::resolve(Profile::Desk, &SizeOverrides::default());
        let full = Sizes::resolve(Profile::Paper, &SizeOverrides::default());
        assert_eq!((desk.hidden, desk.recurrent_hidden, desk.optimizer.epochs), (64, 64, 50));
        assert_eq!((full.hidden, full.recurrent_hidden, full.optimizer.epochs), (8000, 1024, 100));
        assert_eq!((full.rf_estimators, full.ada_iterations), (3000, 3000));
        assert!(desk.rf_estimators < full.rf_estimators);
    }

    #[test]
    fn overrides_win() {
        let o = SizeOverrides { rf_estimators: Some(7), net_epochs: Some(2), ..Default::default() };
        let s = Sizes::resolve(Profile::Paper, &o);
        assert_eq!((s.rf_estimators, s.optimizer.epochs, s.hidden), (7, 2, 8000));
    }
}
