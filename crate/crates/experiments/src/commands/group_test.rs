//! States with few attacks: training supplemented by similar states until
//! a positive-count threshold is passed (single-state mode), and similar
//! states pooled into one train and test group (group mode). Similarity is
//! the order in which states join under average-linkage clustering of
//! per-state mean feature vectors.

use anyhow::{bail, Result};
use serde::Serialize;
use statecast::eval::{run_cv_input, CvInput, Supplements};
use statecast::ingest::LocationDataset;
use statecast::stats::{hier_cluster, Dendrogram, Linkage};

use super::Score;
use crate::data::available_states;
use crate::grid::ModelKind;
use crate::output::num;
use crate::reference;
use crate::Context;

/// Other states ordered by similarity to each state.
pub fn similarity(datasets: &[LocationDataset]) -> Result<(Dendrogram, Vec<Vec<usize>>)> {
    let points: Vec<Vec<f64>> = datasets.iter().map(LocationDataset::mean_features).collect();
    let tree = hier_cluster(&points, Linkage::Average)?;
    let orders = (0..datasets.len()).map(|q| tree.similarity_order(&points, q)).collect();
    Ok((tree, orders))
}

/// The query state plus similar states, added in order until the group's
/// total positives exceed `threshold`.
pub fn pool(datasets: &[LocationDataset], query: usize, order: &[usize], threshold: usize) -> Vec<usize> {
    let mut group = vec![query];
    let mut total = datasets[query].positives();
    for &i in order {
        if total > threshold {
            break;
        }
        group.push(i);
        total += datasets[i].positives();
    }
    group
}

#[derive(Debug, Serialize)]
struct ThresholdPoint {
    threshold: usize,
    score: Option<Score>,
    /// Supplement states used by each fold.
    supplements: Vec<Vec<String>>,
    error: Option<String>,
}

#[derive(Debug, Serialize)]
struct StateResult {
    model: String,
    state: String,
    similar: Vec<String>,
    single_state: Vec<ThresholdPoint>,
    group: Vec<String>,
    group_score: Option<Score>,
    group_error: Option<String>,
    reference_similar: Option<Vec<String>>,
    reference_score: Option<(f64, f64)>,
}

pub fn run(ctx: &Context) -> Result<()> {
    let all = available_states(&ctx.data_dir());
    let (datasets, _) = ctx.load(&all)?;
    if datasets.len() < 2 {
        bail!("group testing needs datasets for at least two states in {}", ctx.data_dir().display());
    }
    let refs: Vec<_> = datasets.iter().collect();
    let mut out = ctx.output("group-test", &refs)?;
    let (tree, orders) = similarity(&datasets)?;
    let index = |s: &str| datasets.iter().position(|d| d.state == s);
    let cv = ctx.cv();
    let mut results = Vec::new();

    for row in &ctx.cfg.models {
        let spec = row.spec(&ctx.sizes);
        for state in &ctx.cfg.group_states {
            let Some(q) = index(state) else {
                out.note(format!("skipped {state}: no dataset"));
                continue;
            };
            let ordered: Vec<&LocationDataset> = orders[q].iter().map(|&i| &datasets[i]).collect();
            let mut single_state = Vec::new();
            for &threshold in &ctx.cfg.group_thresholds {
                let input = CvInput {
                    primary: vec![&datasets[q]],
                    supplements: Supplements::UntilPositives { ordered: ordered.clone(), threshold },
                };
                single_state.push(match run_cv_input(&input, row.window, &spec, &cv) {
                    Ok(r) => ThresholdPoint {
                        threshold,
                        supplements: r.folds.iter().map(|f| f.supplements.clone()).collect(),
                        score: Some(Score::from(&r)),
                        error: None,
                    },
                    Err(e) => {
                        ThresholdPoint { threshold, score: None, supplements: Vec::new(), error: Some(e.to_string()) }
                    }
                });
            }

            let members = pool(&datasets, q, &orders[q], ctx.cfg.group_pool_threshold);
            let input =
                CvInput { primary: members.iter().map(|&i| &datasets[i]).collect(), supplements: Supplements::None };
            let (group_score, group_error) = match run_cv_input(&input, row.window, &spec, &cv) {
                Ok(r) => (Some(Score::from(&r)), None),
                Err(e) => (None, Some(e.to_string())),
            };
            let published = reference::group(state);
            let reference_score = published.and_then(|g| match row.model {
                ModelKind::Rf => Some(g.forest),
                ModelKind::Ffnn1 => Some(g.ffnn),
                _ => None,
            });
            results.push(StateResult {
                model: row.to_string(),
                state: state.clone(),
                similar: orders[q].iter().map(|&i| datasets[i].state.clone()).collect(),
                single_state,
                group: members[1..].iter().map(|&i| datasets[i].state.clone()).collect(),
                group_score,
                group_error,
                reference_similar: published.map(|g| g.similar.iter().map(|s| s.to_string()).collect()),
                reference_score,
            });
        }
    }

    let sweep_rows = results.iter().flat_map(|r| {
        r.single_state.iter().map(move |p| {
            vec![
                r.model.clone(),
                r.state.clone(),
                p.threshold.to_string(),
                p.score.as_ref().map_or(String::new(), |s| num(s.mean_auroc)),
                p.score.as_ref().map_or(String::new(), |s| num(s.std_across_folds)),
                p.supplements.iter().map(|s| s.join("+")).collect::<Vec<_>>().join("|"),
            ]
        })
    });
    out.csv(
        "single_state.csv",
        &["model", "state", "threshold", "mean_auroc", "std_across_folds", "fold_supplements"],
        sweep_rows,
    )?;
    let table_rows = results.iter().map(|r| {
        vec![
            r.model.clone(),
            r.state.clone(),
            r.group.join("+"),
            r.group_score.as_ref().map_or(String::new(), |s| num(s.mean_auroc)),
            r.group_score.as_ref().map_or(String::new(), |s| num(s.std_across_folds)),
            r.reference_similar.as_ref().map_or(String::new(), |g| g.join("+")),
            r.reference_score.map_or(String::new(), |s| num(s.0)),
            r.reference_score.map_or(String::new(), |s| num(s.1)),
        ]
    });
    out.csv(
        "groups.csv",
        &[
            "model",
            "state",
            "similar_states",
            "mean_auroc",
            "std_across_folds",
            "reference_similar",
            "reference_mean",
            "reference_std",
        ],
        table_rows,
    )?;
    out.json("group_test.json", &serde_json::json!({ "dendrogram": tree, "results": results }))?;

    for r in &results {
        let score = r.group_score.as_ref().map_or_else(
            || r.group_error.clone().unwrap_or_default(),
            |s| format!("{:.3} ± {:.3}", s.mean_auroc, s.std_across_folds),
        );
        let published = match (&r.reference_similar, r.reference_score) {
            (Some(g), Some((m, s))) => format!("  [published: {} {m:.3} ± {s:.3}]", g.join(", ")),
            (Some(g), None) => format!("  [published group: {}]", g.join(", ")),
            _ => String::new(),
        };
        println!("{:<18} {} + {:<12} {score}{published}", r.model, r.state, r.group.join(", "));
    }
    out.finish()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;
    use statecast::ingest::{date_range, synth_feature_ids};

    fn ds(state: &str, positives: usize, level: f64) -> LocationDataset {
        let start = chrono::NaiveDate::from_ymd_opt(2016, 1, 1).unwrap();
        let dates = date_range(start, start + chrono::Days::new(29));
        let y = (0..30).map(|i| u8::from(i < positives)).collect();
        LocationDataset::new(state, dates, Array2::from_elem((30, 4), level), y, synth_feature_ids(4)).unwrap()
    }

    #[test]
    fn similarity_excludes_self_and_pool_stops_past_threshold() {
        let sets = vec![ds("LA", 7, 0.0), ds("MO", 7, 0.1), ds("KS", 1, 5.0), ds("NV", 6, 9.0)];
        let (_, orders) = similarity(&sets).unwrap();
        assert_eq!(orders[0], [1, 2, 3]);
        assert!(orders.iter().enumerate().all(|(q, o)| !o.contains(&q) && o.len() == 3));
        assert_eq!(pool(&sets, 0, &orders[0], 12), [0, 1]);
        assert_eq!(pool(&sets, 0, &orders[0], 14), [0, 1, 2]);
        assert_eq!(pool(&sets, 0, &orders[0], 6), [0]);
    }
}
