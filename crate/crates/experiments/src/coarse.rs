//! Coarse evaluation of a trivial nationwide model: every day in the five
//! most attacked states is scored 1 and every other state-day 0, and the
//! pooled state-day array is scored as one test set.

use std::path::Path;

use anyhow::{bail, Context as _, Result};
use serde::Serialize;
use statecast::ingest::states::{is_state_code, STATES};
use statecast::stats::{auprc, auroc, ApConvention};

use crate::reference;

pub const DAYS: usize = 1413;
pub const PREDICTED: [&str; 5] = ["CA", "NY", "TX", "FL", "WA"];

/// Attack counts per state over the study period; states not listed had none.
pub const ATTACK_COUNTS: [(&str, usize); 40] = [
    ("CA", 24),
    ("NY", 24),
    ("TX", 18),
    ("FL", 17),
    ("WA", 14),
    ("LA", 7),
    ("MO", 7),
    ("NV", 6),
    ("PA", 6),
    ("IN", 5),
    ("NC", 5),
    ("TN", 5),
    ("VA", 5),
    ("CO", 4),
    ("IA", 4),
    ("MS", 4),
    ("NM", 4),
    ("GA", 3),
    ("IL", 3),
    ("KY", 3),
    ("MA", 3),
    ("MN", 3),
    ("ND", 3),
    ("OH", 3),
    ("OR", 3),
    ("AZ", 2),
    ("DC", 2),
    ("MD", 2),
    ("MI", 2),
    ("NE", 2),
    ("NJ", 2),
    ("SC", 2),
    ("UT", 2),
    ("WI", 2),
    ("CT", 1),
    ("DE", 1),
    ("ID", 1),
    ("KS", 1),
    ("MT", 1),
    ("WY", 1),
];

pub fn default_counts() -> Vec<(String, usize)> {
    ATTACK_COUNTS.iter().map(|&(s, c)| (s.to_owned(), c)).collect()
}

/// `state,count` lines; `#` comments and a `state,count` header are allowed.
pub fn read_counts(path: &Path) -> Result<Vec<(String, usize)>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() || line.starts_with("state") {
            continue;
        }
        let (s, c) =
            line.split_once(',').with_context(|| format!("{}:{}: expected state,count", path.display(), i + 1))?;
        let s = s.trim().to_ascii_uppercase();
        if !is_state_code(&s) {
            bail!("{}:{}: unknown state `{s}`", path.display(), i + 1);
        }
        let c: usize = c.trim().parse().with_context(|| format!("{}:{}: bad count", path.display(), i + 1))?;
        out.push((s, c));
    }
    Ok(out)
}

/// A label vector of `days` entries with `count` ones spread evenly.
pub fn spread_labels(count: usize, days: usize) -> Result<Vec<u8>> {
    if count > days {
        bail!("{count} attack days do not fit in {days} days");
    }
    let mut y = vec![0u8; days];
    for i in 0..count {
        y[i * days / count] = 1;
    }
    Ok(y)
}

pub fn imbalance(y: &[u8]) -> f64 {
    y.iter().filter(|&&v| v == 1).count() as f64 / y.len() as f64
}

#[derive(Debug, Clone, Serialize)]
pub struct CoarseDemo {
    pub basis: String,
    pub days: usize,
    pub states: usize,
    pub instances: usize,
    pub positives: usize,
    pub predicted_states: Vec<String>,
    pub predicted_positives: usize,
    pub auroc: f64,
    pub auprc: f64,
    pub auprc_convention: String,
    pub auprc_stable_order: f64,
    pub baseline_auroc: f64,
    /// Prevalence, the expected AUPRC of an uninformative score.
    pub baseline_auprc: f64,
    pub reference_auroc: f64,
    pub reference_auprc: f64,
    pub reference_baseline_auroc: f64,
    pub reference_baseline_auprc: f64,
}

/// Instances are state-major in state-code order, days ascending.
pub fn build(counts: &[(String, usize)], days: usize) -> Result<(Vec<f64>, Vec<u8>)> {
    let mut scores = Vec::with_capacity(STATES.len() * days);
    let mut labels = Vec::with_capacity(STATES.len() * days);
    for (code, _) in STATES {
        let count: usize = counts.iter().filter(|(s, _)| s == code).map(|(_, c)| *c).sum();
        labels.extend(spread_labels(count, days)?);
        let s = if PREDICTED.contains(&code) { 1.0 } else { 0.0 };
        scores.extend(std::iter::repeat_n(s, days));
    }
    Ok((scores, labels))
}

pub fn demo(counts: &[(String, usize)], days: usize, basis: &str) -> Result<CoarseDemo> {
    let (scores, labels) = build(counts, days)?;
    let positives = labels.iter().filter(|&&v| v == 1).count();
    let predicted_positives = scores.iter().zip(&labels).filter(|(s, y)| **s == 1.0 && **y == 1).count();
    let constant = vec![0.5; scores.len()];
    Ok(CoarseDemo {
        basis: basis.to_owned(),
        days,
        states: STATES.len(),
        instances: labels.len(),
        positives,
        predicted_states: PREDICTED.iter().map(|s| s.to_string()).collect(),
        predicted_positives,
        auroc: auroc(&scores, &labels)?,
        auprc: auprc(&scores, &labels, ApConvention::TiedBlocks)?,
        auprc_convention: ApConvention::TiedBlocks.as_str().to_owned(),
        auprc_stable_order: auprc(&scores, &labels, ApConvention::StableOrder)?,
        baseline_auroc: auroc(&constant, &labels)?,
        baseline_auprc: positives as f64 / labels.len() as f64,
        reference_auroc: reference::COARSE.0,
        reference_auprc: reference::COARSE.1,
        reference_baseline_auroc: reference::COARSE_BASELINES.0,
        reference_baseline_auprc: reference::COARSE_BASELINES.1,
    })
}
