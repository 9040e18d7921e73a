use anyhow::Result;
use serde::Serialize;

use super::{evaluate, load_required, Score};
use crate::output::num;
use crate::Context;

#[derive(Debug, Serialize)]
struct Curve {
    state: String,
    model: String,
    points: Vec<(usize, Score)>,
    best_window: Option<usize>,
}

pub fn run(ctx: &Context) -> Result<()> {
    let (datasets, missing) = load_required(ctx)?;
    let refs: Vec<_> = datasets.iter().collect();
    let mut out = ctx.output("sweep-windows", &refs)?;
    for m in &missing {
        out.note(format!("skipped {m}: no dataset"));
    }
    let mut curves = Vec::new();
    for ds in &datasets {
        for sweep in &ctx.cfg.sweep_models {
            let mut points = Vec::new();
            for &days in &ctx.cfg.sweep_windows {
                let row = sweep.at(days);
                match evaluate(ctx, ds, &row) {
                    Ok(r) => points.push((days, Score::from(&r))),
                    Err(e) => out.note(format!("{} {row}: {e}", ds.state)),
                }
            }
            let best_window = points
                .iter()
                .filter(|(_, s)| !s.mean_auroc.is_nan())
                .max_by(|a, b| a.1.mean_auroc.total_cmp(&b.1.mean_auroc).then(b.0.cmp(&a.0)))
                .map(|(d, _)| *d);
            out.note(format!(
                "{} {sweep}: best window {}",
                ds.state,
                best_window.map_or("none".into(), |w| w.to_string())
            ));
            curves.push(Curve { state: ds.state.clone(), model: sweep.to_string(), points, best_window });
        }
    }
    let rows = curves.iter().flat_map(|c| {
        c.points.iter().map(move |(d, s)| {
            vec![
                c.state.clone(),
                c.model.clone(),
                d.to_string(),
                num(s.mean_auroc),
                num(s.std_across_folds),
                num(s.std_across_repeats),
            ]
        })
    });
    out.csv("sweep.csv", &["state", "model", "window", "mean_auroc", "std_across_folds", "std_across_repeats"], rows)?;
    out.json("sweep.json", &curves)?;
    for c in &curves {
        let line: Vec<String> = c.points.iter().map(|(d, s)| format!("{d}:{:.3}", s.mean_auroc)).collect();
        println!(
            "{} {} best={}  {}",
            c.state,
            c.model,
            c.best_window.map_or("none".into(), |w| w.to_string()),
            line.join(" ")
        );
    }
    out.finish()?;
    Ok(())
}
