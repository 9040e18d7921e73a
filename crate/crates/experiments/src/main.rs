use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context as _, Result};
use clap::{Parser, Subcommand};
use statecast_experiments::commands;
use statecast_experiments::config::ExperimentConfig;
use statecast_experiments::profile::Profile;
use statecast_experiments::Context;

/// Daily per-state attack forecasting experiments over news-derived features.
#[derive(Debug, Parser)]
#[command(name = "statecast", version)]
struct Cli {
    /// Flat `key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed for every randomized step.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Model size preset.
    #[arg(long, global = true, value_enum)]
    profile: Option<Profile>,
    /// Output root; datasets default to `<out>/data`.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Override a configuration key, e.g. `--set repeats=2`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build per-state datasets from news and incident files.
    Ingest,
    /// Generate synthetic per-state datasets and incidents.
    Synth,
    /// Cross-validate the model and representation grid for each state.
    Baseline,
    /// AUROC against history window length.
    SweepWindows,
    /// Predicted probability against days since the previous attack.
    TemporalLocality,
    /// AUROC against the number of positives in each training fold.
    TrainCorr,
    /// Drop each feature group in turn.
    Ablate,
    /// Predicted probabilities by attack, weapon, target and group.
    Characteristics,
    /// Multi-day prediction windows, propagated and aggregated.
    PredWindows,
    /// Supplement training with one other state's data.
    Transfer,
    /// Supplement or pool similar states for states with few attacks.
    GroupTest,
    /// Coarse-grained evaluation on per-state attack counts.
    CoarseDemo,
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    for kv in &cli.overrides {
        let (k, v) = kv.split_once('=').with_context(|| format!("--set expects KEY=VALUE, got `{kv}`"))?;
        cfg.set(k.trim(), v.trim())?;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(profile) = cli.profile {
        cfg.profile = profile;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    let ctx = Context::new(build_config(&cli)?, &cli.out)?;
    match cli.command {
        Command::Ingest => commands::ingest::run(&ctx),
        Command::Synth => commands::synth::run(&ctx),
        Command::Baseline => commands::baseline::run(&ctx),
        Command::SweepWindows => commands::sweep::run(&ctx),
        Command::TemporalLocality => commands::locality::run(&ctx),
        Command::TrainCorr => commands::train_corr::run(&ctx),
        Command::Ablate => commands::ablate::run(&ctx),
        Command::Characteristics => commands::characteristics::run(&ctx),
        Command::PredWindows => commands::pred_windows::run(&ctx),
        Command::Transfer => commands::transfer::run(&ctx),
        Command::GroupTest => commands::group_test::run(&ctx),
        Command::CoarseDemo => commands::coarse_demo::run(&ctx),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
