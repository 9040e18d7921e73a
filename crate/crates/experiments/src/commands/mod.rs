//! One module per subcommand. Each reads datasets from the data directory,
//! writes JSON and CSV under `<out>/<command>/` and prints a short summary.

pub mod ablate;
pub mod baseline;
pub mod characteristics;
pub mod coarse_demo;
pub mod group_test;
pub mod ingest;
pub mod locality;
pub mod pred_windows;
pub mod sweep;
pub mod synth;
pub mod train_corr;
pub mod transfer;

use anyhow::Result;
use serde::Serialize;
use statecast::eval::{run_cv, EvalReport};
use statecast::ingest::LocationDataset;
use statecast::stats::spearman;

use crate::grid::Row;
use crate::output::num;
use crate::Context;

pub(crate) fn evaluate(ctx: &Context, ds: &LocationDataset, row: &Row) -> statecast::Result<EvalReport> {
    run_cv(ds, row.window, &row.spec(&ctx.sizes), &ctx.cv())
}

pub(crate) const SUMMARY_HEADER: [&str; 5] =
    ["mean_auroc", "std_across_folds", "std_across_repeats", "mean_auprc", "excluded_folds"];

pub(crate) fn summary_cols(r: &EvalReport) -> Vec<String> {
    vec![
        num(r.mean_auroc),
        num(r.std_across_folds),
        num(r.std_across_repeats),
        num(r.mean_auprc),
        r.exclusions().len().to_string(),
    ]
}

/// Mean and spread of one evaluation, for JSON summaries.
#[derive(Debug, Clone, Serialize)]
pub struct Score {
    pub mean_auroc: f64,
    pub std_across_folds: f64,
    pub std_across_repeats: f64,
    pub mean_auprc: f64,
    pub excluded_folds: usize,
    pub run_fingerprint: String,
}

impl From<&EvalReport> for Score {
    fn from(r: &EvalReport) -> Self {
        Score {
            mean_auroc: r.mean_auroc,
            std_across_folds: r.std_across_folds,
            std_across_repeats: r.std_across_repeats,
            mean_auprc: r.mean_auprc,
            excluded_folds: r.exclusions().len(),
            run_fingerprint: r.fingerprint.clone(),
        }
    }
}

/// Spearman's r_s, or the reason it is undefined.
#[derive(Debug, Clone, Serialize)]
pub struct Correlation {
    pub n: usize,
    pub r_s: Option<f64>,
    pub undefined: Option<String>,
}

pub(crate) fn correlate(x: &[f64], y: &[f64]) -> Correlation {
    if x.len() < 2 {
        return Correlation { n: x.len(), r_s: None, undefined: Some("fewer than two points".into()) };
    }
    match spearman(x, y) {
        Ok(r) => Correlation { n: x.len(), r_s: Some(r), undefined: None },
        Err(e) => Correlation { n: x.len(), r_s: None, undefined: Some(e.to_string()) },
    }
}

pub(crate) fn fmt_score(mean: f64, std: f64) -> String {
    format!("{mean:.3} ± {std:.3}")
}

/// Loads the configured states, failing only when none are available.
pub(crate) fn load_required(ctx: &Context) -> Result<(Vec<LocationDataset>, Vec<String>)> {
    let (datasets, missing) = ctx.load(&ctx.cfg.states)?;
    if datasets.is_empty() {
        anyhow::bail!(
            "no datasets for {} in {}; run `synth` or `ingest` first",
            ctx.cfg.states.join(","),
            ctx.data_dir().display()
        );
    }
    Ok((datasets, missing))
}
