//! Experiment suite over per-state news datasets: baseline grid, window
//! sweeps, temporal and training-size analyses, feature ablation, attack
//! characteristics, prediction windows, cross-state transfer, group testing
//! and the coarse-evaluation demo.

pub mod coarse;
pub mod commands;
pub mod config;
pub mod data;
pub mod grid;
pub mod output;
pub mod profile;
pub mod reference;

use std::path::{Path, PathBuf};

use anyhow::Result;
use statecast::eval::{fingerprint, CvConfig};
use statecast::ingest::LocationDataset;

use config::ExperimentConfig;
use output::Output;
use profile::Sizes;

/// Resolved configuration for one command invocation.
pub struct Context {
    pub cfg: ExperimentConfig,
    pub out: PathBuf,
    pub sizes: Sizes,
}

impl Context {
    pub fn new(cfg: ExperimentConfig, out: impl Into<PathBuf>) -> Result<Self> {
        cfg.validate()?;
        let sizes = Sizes::resolve(cfg.profile, &cfg.sizes);
        Ok(Self { cfg, out: out.into(), sizes })
    }

    pub fn cv(&self) -> CvConfig {
        CvConfig {
            folds: self.cfg.folds,
            repeats: self.cfg.repeats,
            seed: self.cfg.seed,
            ap_convention: self.cfg.auprc,
            ..CvConfig::default()
        }
    }

    pub fn data_dir(&self) -> PathBuf {
        self.cfg.data_dir(&self.out)
    }

    /// Loads datasets for `states` from the data directory, noting any
    /// that are missing.
    pub fn load(&self, states: &[String]) -> Result<(Vec<LocationDataset>, Vec<String>)> {
        data::load_states(&self.data_dir(), states)
    }

    /// Output for `command`, fingerprinted by the configuration, the
    /// resolved model sizes and the content of every input dataset.
    pub fn output(&self, command: &'static str, inputs: &[&LocationDataset]) -> Result<Output> {
        let digests: Vec<(String, String)> =
            inputs.iter().map(|ds| Ok((ds.state.clone(), data::digest(ds)?))).collect::<Result<_>>()?;
        let fp = fingerprint(&(command, &self.cfg, &self.sizes, &digests))?;
        Output::new(&self.out, command, fp)
    }

    pub fn out_dir(&self) -> &Path {
        &self.out
    }
}
