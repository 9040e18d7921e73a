//! Predicted probabilities on attack days grouped by attack type, weapon,
//! target and responsible group, compared with Kruskal-Wallis.

use std::collections::BTreeMap;

use anyhow::{Context as _, Result};
use chrono::NaiveDate;
use serde::Serialize;
use statecast::ingest::IncidentRecord;
use statecast::stats::{kruskal_wallis, mean, std_dev, HTestResult};

use super::{evaluate, load_required};
use crate::data::load_incidents;
use crate::output::num;
use crate::reference;
use crate::Context;

pub const OTHER: &str = "other";

type Field = fn(&IncidentRecord) -> &str;

const DIMENSIONS: [(&str, Field); 4] = [
    ("attack_type", |i| &i.attack_type),
    ("weapon_type", |i| &i.weapon_type),
    ("target_type", |i| &i.target_type),
    ("group_name", |i| &i.group_name),
];

/// Box-plot summary: the box spans one standard deviation either side of
/// the mean and the whiskers three.
#[derive(Debug, Clone, Serialize)]
pub struct BoxStats {
    pub category: String,
    pub n: usize,
    pub mean: f64,
    pub std: f64,
    pub box_low: f64,
    pub box_high: f64,
    pub whisker_low: f64,
    pub whisker_high: f64,
}

#[derive(Debug, Serialize)]
pub struct DimensionResult {
    pub dimension: String,
    pub test: Option<HTestResult>,
    pub undefined: Option<String>,
    pub pooled_into_other: Vec<String>,
    pub boxes: Vec<BoxStats>,
}

/// Categories with fewer than two events are merged into [`OTHER`].
pub fn group_by_category(events: &[(&str, f64)]) -> (Vec<(String, Vec<f64>)>, Vec<String>) {
    let mut by: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for &(cat, p) in events {
        by.entry(cat).or_default().push(p);
    }
    let mut groups = Vec::new();
    let mut other = Vec::new();
    let mut pooled = Vec::new();
    for (cat, ps) in by {
        if ps.len() < 2 || cat == OTHER {
            if ps.len() < 2 {
                pooled.push(cat.to_owned());
            }
            other.extend(ps);
        } else {
            groups.push((cat.to_owned(), ps));
        }
    }
    if !other.is_empty() {
        groups.push((OTHER.to_owned(), other));
    }
    (groups, pooled)
}

pub fn analyse(dimension: &str, events: &[(&str, f64)]) -> DimensionResult {
    let (groups, pooled) = group_by_category(events);
    let boxes = groups
        .iter()
        .map(|(cat, ps)| {
            let (m, s) = (mean(ps), std_dev(ps));
            BoxStats {
                category: cat.clone(),
                n: ps.len(),
                mean: m,
                std: s,
                box_low: m - s,
                box_high: m + s,
                whisker_low: m - 3.0 * s,
                whisker_high: m + 3.0 * s,
            }
        })
        .collect();
    let samples: Vec<Vec<f64>> = groups.into_iter().map(|(_, ps)| ps).collect();
    let (test, undefined) = match kruskal_wallis(&samples) {
        Ok(t) => (Some(t), None),
        Err(e) => (None, Some(e.to_string())),
    };
    DimensionResult { dimension: dimension.to_owned(), test, undefined, pooled_into_other: pooled, boxes }
}

#[derive(Debug, Serialize)]
struct ModelResult {
    model: String,
    events: usize,
    dimensions: Vec<DimensionResult>,
    reference_p_above: f64,
}

pub fn run(ctx: &Context) -> Result<()> {
    let (datasets, missing) = load_required(ctx)?;
    let incidents = load_incidents(&ctx.data_dir())?
        .with_context(|| format!("no incident file in {}", ctx.data_dir().display()))?;
    let refs: Vec<_> = datasets.iter().collect();
    let mut out = ctx.output("characteristics", &refs)?;
    for m in &missing {
        out.note(format!("skipped {m}: no dataset"));
    }
    let mut results = Vec::new();
    let mut event_rows = Vec::new();
    let mut box_rows = Vec::new();
    for row in &ctx.cfg.models {
        let mut p_of: BTreeMap<(String, NaiveDate), f64> = BTreeMap::new();
        for ds in &datasets {
            match evaluate(ctx, ds, row) {
                Ok(r) => p_of.extend(r.mean_predictions().into_iter().map(|p| ((p.state, p.date), p.p))),
                Err(e) => out.note(format!("{} {row}: {e}", ds.state)),
            }
        }
        let events: Vec<(&IncidentRecord, f64)> =
            incidents.iter().filter_map(|i| p_of.get(&(i.state.clone(), i.date)).map(|&p| (i, p))).collect();
        let dimensions: Vec<DimensionResult> = DIMENSIONS
            .iter()
            .map(|(name, field)| {
                let pairs: Vec<(&str, f64)> = events.iter().map(|(i, p)| (field(i), *p)).collect();
                analyse(name, &pairs)
            })
            .collect();
        println!("{row}: {} attacks with a test prediction", events.len());
        for d in &dimensions {
            let stat = d.test.map_or_else(
                || format!("undefined ({})", d.undefined.clone().unwrap_or_default()),
                |t| format!("H={:.3} p={:.3} groups={}", t.h, t.p_value, t.groups),
            );
            println!("  {:<12} {stat}", d.dimension);
            box_rows.extend(d.boxes.iter().map(|b| {
                vec![
                    row.to_string(),
                    d.dimension.clone(),
                    b.category.clone(),
                    b.n.to_string(),
                    num(b.mean),
                    num(b.std),
                    num(b.box_low),
                    num(b.box_high),
                    num(b.whisker_low),
                    num(b.whisker_high),
                ]
            }));
        }
        println!("  (published analysis on the full corpus: every p > {})", reference::CHARACTERISTICS_P_ABOVE);
        event_rows.extend(events.iter().map(|(i, p)| {
            vec![
                row.to_string(),
                i.event_id.clone(),
                i.state.clone(),
                i.date.to_string(),
                i.attack_type.clone(),
                i.weapon_type.clone(),
                i.target_type.clone(),
                i.group_name.clone(),
                num(*p),
            ]
        }));
        results.push(ModelResult {
            model: row.to_string(),
            events: events.len(),
            dimensions,
            reference_p_above: reference::CHARACTERISTICS_P_ABOVE,
        });
    }
    out.csv(
        "events.csv",
        &["model", "event_id", "state", "date", "attack_type", "weapon_type", "target_type", "group_name", "p"],
        event_rows,
    )?;
    out.csv(
        "boxes.csv",
        &["model", "dimension", "category", "n", "mean", "std", "box_low", "box_high", "whisker_low", "whisker_high"],
        box_rows,
    )?;
    out.json("characteristics.json", &results)?;
    out.finish()?;
    Ok(())
}
