//! Coarser prediction targets: labels propagated over `Δp` days, or days
//! aggregated into `Δp`-day blocks.

use anyhow::Result;
use serde::Serialize;
use statecast::features::{aggregate_dataset, propagate_dataset};

use super::{evaluate, load_required, Score};
use crate::output::num;
use crate::Context;

#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "snake_case")]
enum Mode {
    Propagate,
    Aggregate,
}

#[derive(Debug, Serialize)]
struct Point {
    model: String,
    state: String,
    mode: Mode,
    dp: usize,
    rows: usize,
    positives: usize,
    score: Option<Score>,
    error: Option<String>,
}

pub fn run(ctx: &Context) -> Result<()> {
    let (datasets, missing) = load_required(ctx)?;
    let refs: Vec<_> = datasets.iter().collect();
    let mut out = ctx.output("pred-windows", &refs)?;
    for m in &missing {
        out.note(format!("skipped {m}: no dataset"));
    }
    let mut points = Vec::new();
    for row in &ctx.cfg.models {
        for ds in &datasets {
            for mode in [Mode::Propagate, Mode::Aggregate] {
                for &dp in &ctx.cfg.pred_windows {
                    let coarse = match mode {
                        Mode::Propagate => propagate_dataset(ds, dp),
                        Mode::Aggregate => aggregate_dataset(ds, dp),
                    };
                    let coarse = match coarse {
                        Ok(c) => c,
                        Err(e) => {
                            out.note(format!("{} {mode:?} {dp}: {e}", ds.state));
                            continue;
                        }
                    };
                    let (score, error) = match evaluate(ctx, &coarse, row) {
                        Ok(r) => (Some(Score::from(&r)), None),
                        Err(e) => (None, Some(e.to_string())),
                    };
                    points.push(Point {
                        model: row.to_string(),
                        state: ds.state.clone(),
                        mode,
                        dp,
                        rows: coarse.n_days(),
                        positives: coarse.positives(),
                        score,
                        error,
                    });
                }
            }
        }
    }
    let rows = points.iter().map(|p| {
        vec![
            p.model.clone(),
            p.state.clone(),
            format!("{:?}", p.mode).to_lowercase(),
            p.dp.to_string(),
            p.rows.to_string(),
            p.positives.to_string(),
            p.score.as_ref().map_or(String::new(), |s| num(s.mean_auroc)),
            p.score.as_ref().map_or(String::new(), |s| num(s.std_across_folds)),
            p.error.clone().unwrap_or_default(),
        ]
    });
    out.csv(
        "pred_windows.csv",
        &["model", "state", "mode", "dp", "rows", "positives", "mean_auroc", "std_across_folds", "error"],
        rows,
    )?;
    out.json("pred_windows.json", &points)?;
    for p in &points {
        println!(
            "{:<18} {} {:<9} dp={:<2} rows={:<5} pos={:<4} {}",
            p.model,
            p.state,
            format!("{:?}", p.mode).to_lowercase(),
            p.dp,
            p.rows,
            p.positives,
            p.score.as_ref().map_or_else(|| p.error.clone().unwrap_or_default(), |s| format!("{:.3}", s.mean_auroc))
        );
    }
    out.finish()?;
    Ok(())
}
