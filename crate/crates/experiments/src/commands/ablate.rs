//! Each model retrained with one feature group removed.

use anyhow::Result;
use serde::Serialize;
use statecast::ingest::FeatureGroup;

use super::{evaluate, load_required, Score};
use crate::output::num;
use crate::Context;

#[derive(Debug, Serialize)]
struct Cell {
    model: String,
    state: String,
    dropped: Option<FeatureGroup>,
    features: usize,
    score: Option<Score>,
    error: Option<String>,
}

pub fn run(ctx: &Context) -> Result<()> {
    let (datasets, missing) = load_required(ctx)?;
    let refs: Vec<_> = datasets.iter().collect();
    let mut out = ctx.output("ablate", &refs)?;
    for m in &missing {
        out.note(format!("skipped {m}: no dataset"));
    }
    let mut cells = Vec::new();
    for row in &ctx.cfg.models {
        for ds in &datasets {
            let variants = std::iter::once(None).chain(FeatureGroup::ALL.into_iter().map(Some));
            for dropped in variants {
                let reduced = match dropped {
                    None => ds.clone(),
                    Some(g) => ds.without_groups(&[g]),
                };
                let (score, error) = match evaluate(ctx, &reduced, row) {
                    Ok(r) => (Some(Score::from(&r)), None),
                    Err(e) => (None, Some(e.to_string())),
                };
                cells.push(Cell {
                    model: row.to_string(),
                    state: ds.state.clone(),
                    dropped,
                    features: reduced.n_features(),
                    score,
                    error,
                });
            }
        }
    }
    let rows = cells.iter().map(|c| {
        vec![
            c.model.clone(),
            c.state.clone(),
            c.dropped.map_or("none".into(), |g| g.to_string()),
            c.features.to_string(),
            c.score.as_ref().map_or(String::new(), |s| num(s.mean_auroc)),
            c.score.as_ref().map_or(String::new(), |s| num(s.std_across_folds)),
            c.error.clone().unwrap_or_default(),
        ]
    });
    out.csv("ablate.csv", &["model", "state", "dropped", "features", "mean_auroc", "std_across_folds", "error"], rows)?;
    out.json("ablate.json", &cells)?;
    for c in &cells {
        println!(
            "{:<18} {} drop {:<16} m={:<4} {}",
            c.model,
            c.state,
            c.dropped.map_or("none".into(), |g| g.to_string()),
            c.features,
            c.score.as_ref().map_or_else(|| c.error.clone().unwrap_or_default(), |s| format!("{:.3}", s.mean_auroc))
        );
    }
    out.finish()?;
    Ok(())
}
