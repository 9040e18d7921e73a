//! Predicted probability on each attack day against the days elapsed since
//! the previous attack in the same state.

use anyhow::Result;
use chrono::NaiveDate;
use serde::Serialize;
use statecast::ingest::LocationDataset;

use super::{correlate, evaluate, load_required, Correlation};
use crate::output::num;
use crate::Context;

#[derive(Debug, Clone, Serialize)]
pub struct EventPoint {
    pub state: String,
    pub date: NaiveDate,
    pub days_since_previous: i64,
    pub p: f64,
}

#[derive(Debug, Serialize)]
struct StateCorrelation {
    state: String,
    #[serde(flatten)]
    corr: Correlation,
}

#[derive(Debug, Serialize)]
struct ModelResult {
    model: String,
    per_state: Vec<StateCorrelation>,
    pooled: Correlation,
}

/// Events with a test prediction, excluding each state's first event.
pub fn event_points(ds: &LocationDataset, predictions: &[statecast::eval::Prediction]) -> Vec<EventPoint> {
    let mut out = Vec::new();
    let mut previous: Option<NaiveDate> = None;
    for (i, &date) in ds.dates.iter().enumerate() {
        if ds.y[i] != 1 {
            continue;
        }
        if let Some(prev) = previous {
            if let Some(p) = predictions.iter().find(|p| p.state == ds.state && p.date == date) {
                out.push(EventPoint {
                    state: ds.state.clone(),
                    date,
                    days_since_previous: (date - prev).num_days(),
                    p: p.p,
                });
            }
        }
        previous = Some(date);
    }
    out
}

pub fn run(ctx: &Context) -> Result<()> {
    let (datasets, missing) = load_required(ctx)?;
    let refs: Vec<_> = datasets.iter().collect();
    let mut out = ctx.output("temporal-locality", &refs)?;
    for m in &missing {
        out.note(format!("skipped {m}: no dataset"));
    }
    let mut results = Vec::new();
    let mut rows = Vec::new();
    for row in &ctx.cfg.models {
        let mut pooled = Vec::new();
        let mut per_state = Vec::new();
        for ds in &datasets {
            let report = match evaluate(ctx, ds, row) {
                Ok(r) => r,
                Err(e) => {
                    out.note(format!("{} {row}: {e}", ds.state));
                    continue;
                }
            };
            let points = event_points(ds, &report.mean_predictions());
            let (x, y): (Vec<f64>, Vec<f64>) = points.iter().map(|e| (e.days_since_previous as f64, e.p)).unzip();
            per_state.push(StateCorrelation { state: ds.state.clone(), corr: correlate(&x, &y) });
            pooled.extend(points);
        }
        let (x, y): (Vec<f64>, Vec<f64>) = pooled.iter().map(|e| (e.days_since_previous as f64, e.p)).unzip();
        let result = ModelResult { model: row.to_string(), per_state, pooled: correlate(&x, &y) };
        println!("{row}: pooled r_s {} over {} events", fmt_rs(&result.pooled), result.pooled.n);
        for s in &result.per_state {
            println!("  {} r_s {} (n={})", s.state, fmt_rs(&s.corr), s.corr.n);
        }
        rows.extend(
            pooled.into_iter().map(|e| {
                vec![row.to_string(), e.state, e.date.to_string(), e.days_since_previous.to_string(), num(e.p)]
            }),
        );
        results.push(result);
    }
    out.csv("events.csv", &["model", "state", "date", "days_since_previous", "p"], rows)?;
    out.json("locality.json", &results)?;
    out.finish()?;
    Ok(())
}

pub(crate) fn fmt_rs(c: &Correlation) -> String {
    c.r_s.map_or_else(|| "undefined".to_owned(), |r| format!("{r:.3}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;
    use statecast::eval::Prediction;
    use statecast::ingest::{date_range, synth_feature_ids};

    #[test]
    fn first_event_is_excluded_and_elapsed_is_within_state() {
        let start = NaiveDate::from_ymd_opt(2016, 1, 1).unwrap();
        let dates = date_range(start, start + chrono::Days::new(9));
        let y = vec![0, 1, 0, 0, 1, 0, 0, 0, 0, 1];
        let ds = LocationDataset::new("NY", dates.clone(), Array2::zeros((10, 4)), y, synth_feature_ids(4)).unwrap();
        let pred = |state: &str, i: usize, p: f64| Prediction {
            repeat: 0,
            fold: 0,
            state: state.into(),
            date: dates[i],
            y: 1,
            p,
        };
        let preds = vec![pred("NY", 1, 0.1), pred("NY", 4, 0.2), pred("NY", 9, 0.3), pred("CA", 4, 0.9)];
        let pts = event_points(&ds, &preds);
        assert_eq!(pts.len(), 2);
        assert_eq!((pts[0].days_since_previous, pts[0].p), (3, 0.2));
        assert_eq!((pts[1].days_since_previous, pts[1].p), (5, 0.3));

        let single = LocationDataset::new(
            "NY",
            dates,
            Array2::zeros((10, 4)),
            vec![0, 0, 1, 0, 0, 0, 0, 0, 0, 0],
            synth_feature_ids(4),
        )
        .unwrap();
        assert!(event_points(&single, &preds).is_empty());
    }
}
