//! Fold AUROC against the number of positives in the fold's training set.

use anyhow::Result;
use serde::Serialize;

use super::locality::fmt_rs;
use super::{correlate, evaluate, load_required, Correlation};
use crate::grid::ModelKind;
use crate::output::num;
use crate::reference;
use crate::Context;

#[derive(Debug, Clone, Serialize)]
pub struct FoldPoint {
    pub state: String,
    pub repeat: usize,
    pub fold: usize,
    pub train_positives: usize,
    pub auroc: f64,
}

#[derive(Debug, Serialize)]
struct ModelResult {
    model: String,
    folds: usize,
    all: Correlation,
    excluded_state: Option<String>,
    without_excluded: Option<Correlation>,
    reference: Option<(f64, f64)>,
}

pub fn correlations(points: &[FoldPoint], exclude: Option<&str>) -> (Correlation, Option<Correlation>) {
    let xy = |keep: &dyn Fn(&FoldPoint) -> bool| -> (Vec<f64>, Vec<f64>) {
        points.iter().filter(|p| keep(p)).map(|p| (p.train_positives as f64, p.auroc)).unzip()
    };
    let (x, y) = xy(&|_| true);
    let all = correlate(&x, &y);
    let without = exclude.map(|s| {
        let (x, y) = xy(&|p| p.state != s);
        correlate(&x, &y)
    });
    (all, without)
}

pub fn run(ctx: &Context) -> Result<()> {
    let (datasets, missing) = load_required(ctx)?;
    let refs: Vec<_> = datasets.iter().collect();
    let mut out = ctx.output("train-corr", &refs)?;
    for m in &missing {
        out.note(format!("skipped {m}: no dataset"));
    }
    let exclude = ctx.cfg.corr_exclude.as_deref();
    let mut results = Vec::new();
    let mut rows = Vec::new();
    for row in &ctx.cfg.models {
        let mut points = Vec::new();
        for ds in &datasets {
            let report = match evaluate(ctx, ds, row) {
                Ok(r) => r,
                Err(e) => {
                    out.note(format!("{} {row}: {e}", ds.state));
                    continue;
                }
            };
            for r in &report.results {
                let summary = report.folds.iter().find(|f| f.fold == r.fold).expect("fold summary for every result");
                points.push(FoldPoint {
                    state: ds.state.clone(),
                    repeat: r.repeat,
                    fold: r.fold,
                    train_positives: summary.train_positives,
                    auroc: r.auroc,
                });
            }
        }
        let (all, without) = correlations(&points, exclude);
        let reference = (row.model == ModelKind::Rf).then_some(reference::TRAIN_CORR_RS);
        println!(
            "{row}: r_s {} over {} folds; without {} {}",
            fmt_rs(&all),
            points.len(),
            exclude.unwrap_or("-"),
            without.as_ref().map_or("-".into(), fmt_rs)
        );
        rows.extend(points.iter().map(|p| {
            vec![
                row.to_string(),
                p.state.clone(),
                p.repeat.to_string(),
                p.fold.to_string(),
                p.train_positives.to_string(),
                num(p.auroc),
            ]
        }));
        results.push(ModelResult {
            model: row.to_string(),
            folds: points.len(),
            all,
            excluded_state: exclude.map(String::from),
            without_excluded: without,
            reference,
        });
    }
    out.csv("folds.csv", &["model", "state", "repeat", "fold", "train_positives", "auroc"], rows)?;
    out.json("train_corr.json", &results)?;
    out.finish()?;
    Ok(())
}
