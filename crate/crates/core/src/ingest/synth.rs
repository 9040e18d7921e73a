//! Desk-scale synthetic datasets with an optional planted precursor signal.

use chrono::NaiveDate;
use ndarray::Array2;
use rand::seq::index::sample;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::dataset::{date_range, LocationDataset};
use super::incidents::IncidentRecord;
use super::registry::{FeatureGroup, FeatureId, CAMEO_COUNT, FEATURE_COUNT, THEME_COUNT};
use super::states::STATES;
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Signal {
    None,
    /// Features in the affected subset get their mean shifted by `shift`
    /// (in units of the unit-variance base noise) on the `window_len` days
    /// preceding each positive day. `group` restricts the affected subset to
    /// one feature group.
    Planted {
        window_len: usize,
        affected_fraction: f64,
        shift: f64,
        group: Option<FeatureGroup>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_days: usize,
    pub m_features: usize,
    pub n_states: usize,
    pub imbalance: f64,
    pub signal: Signal,
    pub seed: u64,
    pub start: NaiveDate,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_days: 800,
            m_features: 40,
            n_states: 1,
            imbalance: 0.02,
            signal: Signal::None,
            seed: 0,
            start: NaiveDate::from_ymd_opt(2015, 2, 18).expect("valid date"),
        }
    }
}

/// States in the order synthetic datasets are assigned: the five most
/// attacked first, then the rest alphabetically.
pub fn state_order() -> Vec<&'static str> {
    let head = ["NY", "CA", "TX", "FL", "WA"];
    head.iter().copied().chain(STATES.iter().map(|(c, _)| *c).filter(|c| !head.contains(c))).collect()
}

/// Feature ids for `m` synthetic columns, split across the four groups in the
/// same proportions as the real registry.
pub fn synth_feature_ids(m: usize) -> Vec<FeatureId> {
    let share = |k: usize| ((m * k) as f64 / FEATURE_COUNT as f64).round() as usize;
    let tc = share(THEME_COUNT);
    let cc = share(CAMEO_COUNT);
    let sizes = [tc, tc, cc, m.saturating_sub(2 * tc + cc)];
    let mut ids = Vec::with_capacity(m);
    for (group, size) in FeatureGroup::ALL.into_iter().zip(sizes) {
        for _ in 0..size {
            if ids.len() < m {
                ids.push(FeatureId::new(group, format!("s{:03}", ids.len())));
            }
        }
    }
    ids
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_days == 0 || self.m_features == 0 || self.n_states == 0 {
            return Err(Error::invalid("synthetic sizes must be positive"));
        }
        if self.n_states > STATES.len() {
            return Err(Error::invalid(format!("at most {} states", STATES.len())));
        }
        if !(self.imbalance > 0.0 && self.imbalance < 1.0) {
            return Err(Error::invalid("imbalance must lie in (0, 1)"));
        }
        if self.imbalance * (self.n_days as f64) < 1.0 {
            return Err(Error::invalid(format!(
                "imbalance {} over {} days leaves no positive day",
                self.imbalance, self.n_days
            )));
        }
        if let Signal::Planted { window_len, affected_fraction, .. } = self.signal {
            if window_len == 0 {
                return Err(Error::invalid("planted window_len must be at least 1"));
            }
            if !(0.0..=1.0).contains(&affected_fraction) {
                return Err(Error::invalid("affected_fraction must lie in [0, 1]"));
            }
        }
        Ok(())
    }

    pub fn positives_per_state(&self) -> usize {
        ((self.imbalance * self.n_days as f64).round() as usize).max(1)
    }
}

/// One dataset per state; a pure function of `config`.
pub fn synth_generate(config: &SynthConfig) -> Result<Vec<LocationDataset>> {
    config.validate()?;
    let n = config.n_days;
    let m = config.m_features;
    let ids = synth_feature_ids(m);
    let dates = date_range(config.start, config.start + chrono::Days::new(n as u64 - 1));
    let order = state_order();
    (0..config.n_states)
        .map(|s| {
            let mut rng = rng::stream(config.seed, &[0x5e_ed, s as u64]);
            let mut positives: Vec<usize> = sample(&mut rng, n, config.positives_per_state()).into_vec();
            positives.sort_unstable();
            let mut y = vec![0u8; n];
            for &p in &positives {
                y[p] = 1;
            }
            let mut x = Array2::<f64>::zeros((n, m));
            for v in x.iter_mut() {
                *v = StandardNormal.sample(&mut rng);
            }
            if let Signal::Planted { window_len, affected_fraction, shift, group } = config.signal {
                let candidates: Vec<usize> = (0..m).filter(|&j| group.is_none_or(|g| ids[j].group == g)).collect();
                let k = ((affected_fraction * candidates.len() as f64).ceil() as usize).min(candidates.len());
                let mut affected: Vec<usize> =
                    sample(&mut rng, candidates.len(), k).into_iter().map(|i| candidates[i]).collect();
                affected.sort_unstable();
                let mut shifted = vec![false; n];
                for &p in &positives {
                    shifted[p.saturating_sub(window_len)..p].fill(true);
                }
                for (day, _) in shifted.iter().enumerate().filter(|(_, s)| **s) {
                    for &j in &affected {
                        x[[day, j]] += shift;
                    }
                }
            }
            LocationDataset::new(order[s], dates.clone(), x, y, ids.clone())
        })
        .collect()
}

const ATTACK_TYPES: [&str; 5] = [
    "Armed Assault",
    "Bombing/Explosion",
    "Facility/Infrastructure Attack",
    "Unarmed Assault",
    "Hostage Taking (Kidnapping)",
];
const WEAPON_TYPES: [&str; 4] = ["Firearms", "Explosives", "Incendiary", "Melee"];
const TARGET_TYPES: [&str; 5] =
    ["Private Citizens & Property", "Religious Figures/Institutions", "Business", "Government (General)", "Police"];
const GROUPS: [&str; 4] = ["Unknown", "Anti-Government extremists", "White extremists", "Jihadi-inspired extremists"];

/// GTD-style incidents for the positive days of synthetic datasets, with
/// categories drawn at random (and therefore unrelated to the features).
pub fn synth_incidents(config: &SynthConfig, datasets: &[LocationDataset]) -> Vec<IncidentRecord> {
    let mut out = Vec::new();
    for (s, ds) in datasets.iter().enumerate() {
        let mut rng = rng::stream(config.seed, &[0x1c1d, s as u64]);
        for (i, _) in ds.y.iter().enumerate().filter(|(_, &v)| v == 1) {
            let pick =
                |rng: &mut rand_chacha::ChaCha8Rng, opts: &[&str]| opts[rng.random_range(0..opts.len())].to_owned();
            out.push(IncidentRecord {
                event_id: format!("{}{:04}", ds.dates[i].format("%Y%m%d"), s),
                state: ds.state.clone(),
                date: ds.dates[i],
                attack_type: pick(&mut rng, &ATTACK_TYPES),
                weapon_type: pick(&mut rng, &WEAPON_TYPES),
                target_type: pick(&mut rng, &TARGET_TYPES),
                group_name: pick(&mut rng, &GROUPS),
                success: rng.random_bool(0.838),
            });
        }
    }
    out
}
