//! Dataset directories: one `<STATE>.csv` per state plus an optional
//! `incidents.csv`.

use std::path::{Path, PathBuf};

use anyhow::{Context as _, Result};
use statecast::eval::fingerprint;
use statecast::ingest::{parse_incidents, states, IncidentRecord, LocationDataset};

pub const INCIDENTS_FILE: &str = "incidents.csv";

pub fn dataset_path(dir: &Path, state: &str) -> PathBuf {
    dir.join(format!("{state}.csv"))
}

/// Loads the requested states in order. Missing files are skipped and
/// reported; unreadable files are errors.
pub fn load_states(dir: &Path, wanted: &[String]) -> Result<(Vec<LocationDataset>, Vec<String>)> {
    let mut found = Vec::new();
    let mut missing = Vec::new();
    for state in wanted {
        let path = dataset_path(dir, state);
        if !path.exists() {
            log::warn!("no dataset for {state} at {}; skipping", path.display());
            missing.push(state.clone());
            continue;
        }
        let ds =
            LocationDataset::read_csv(&path, state.as_str()).with_context(|| format!("reading {}", path.display()))?;
        found.push(ds);
    }
    Ok((found, missing))
}

/// Every state with a dataset file, in code order.
pub fn available_states(dir: &Path) -> Vec<String> {
    states::STATES.iter().map(|(code, _)| code.to_string()).filter(|code| dataset_path(dir, code).exists()).collect()
}

pub fn load_incidents(dir: &Path) -> Result<Option<Vec<IncidentRecord>>> {
    let path = dir.join(INCIDENTS_FILE);
    if !path.exists() {
        return Ok(None);
    }
    let (recs, _) = parse_incidents(&path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Some(recs))
}

/// Content hash of a dataset, used in run fingerprints.
pub fn digest(ds: &LocationDataset) -> Result<String> {
    Ok(fingerprint(ds)?)
}
