//! Change in AUROC when one other state's rows supplement training.

use anyhow::Result;
use serde::Serialize;
use statecast::eval::{run_cv_input, CvInput, Supplements};
use statecast::stats::mean;

use super::{evaluate, load_required};
use crate::grid::ModelKind;
use crate::output::{num, opt};
use crate::reference;
use crate::Context;

#[derive(Debug, Clone, Serialize)]
pub struct TransferCell {
    pub test: String,
    pub supplement: String,
    pub auroc: f64,
    pub baseline: f64,
    pub delta: f64,
}

/// ΔAUROC keyed by (test state, supplement state); the diagonal is omitted.
#[derive(Debug, Serialize)]
pub struct HeatmapResult {
    pub model: String,
    pub states: Vec<String>,
    pub cells: Vec<TransferCell>,
    /// Mean change per supplement state.
    pub supplement_avg: Vec<(String, f64)>,
    /// Mean change per test state.
    pub test_avg: Vec<(String, f64)>,
    pub reference_ny_plus_ca: Option<f64>,
}

impl HeatmapResult {
    pub fn new(model: String, states: Vec<String>, cells: Vec<TransferCell>, reference: Option<f64>) -> Self {
        let avg = |key: &dyn Fn(&TransferCell) -> &str, s: &str| {
            mean(&cells.iter().filter(|c| key(c) == s).map(|c| c.delta).collect::<Vec<_>>())
        };
        let supplement_avg = states.iter().map(|s| (s.clone(), avg(&|c| &c.supplement, s))).collect();
        let test_avg = states.iter().map(|s| (s.clone(), avg(&|c| &c.test, s))).collect();
        Self { model, states, cells, supplement_avg, test_avg, reference_ny_plus_ca: reference }
    }

    pub fn get(&self, test: &str, supplement: &str) -> Option<&TransferCell> {
        self.cells.iter().find(|c| c.test == test && c.supplement == supplement)
    }

    /// Supplement states as rows, test states as columns, averages last.
    pub fn matrix_rows(&self) -> Vec<Vec<String>> {
        let mut rows: Vec<Vec<String>> = self
            .states
            .iter()
            .zip(&self.supplement_avg)
            .map(|(supp, (_, a))| {
                let mut r = vec![format!("+{supp}")];
                r.extend(self.states.iter().map(|t| opt(self.get(t, supp).map(|c| c.delta))));
                r.push(num(*a));
                r
            })
            .collect();
        let mut last = vec!["avg".to_owned()];
        last.extend(self.test_avg.iter().map(|(_, a)| num(*a)));
        last.push(String::new());
        rows.push(last);
        rows
    }
}

pub fn run(ctx: &Context) -> Result<()> {
    let (datasets, missing) = load_required(ctx)?;
    let refs: Vec<_> = datasets.iter().collect();
    let mut out = ctx.output("transfer", &refs)?;
    for m in &missing {
        out.note(format!("skipped {m}: no dataset"));
    }
    let states: Vec<String> = datasets.iter().map(|d| d.state.clone()).collect();
    let cv = ctx.cv();
    let mut maps = Vec::new();
    for row in &ctx.cfg.models {
        let spec = row.spec(&ctx.sizes);
        let mut cells = Vec::new();
        for test in &datasets {
            let base = match evaluate(ctx, test, row) {
                Ok(r) => r.mean_auroc,
                Err(e) => {
                    out.note(format!("{} {row}: {e}", test.state));
                    continue;
                }
            };
            for supp in datasets.iter().filter(|s| s.state != test.state) {
                let input = CvInput { primary: vec![test], supplements: Supplements::Fixed(vec![supp]) };
                match run_cv_input(&input, row.window, &spec, &cv) {
                    Ok(r) => cells.push(TransferCell {
                        test: test.state.clone(),
                        supplement: supp.state.clone(),
                        auroc: r.mean_auroc,
                        baseline: base,
                        delta: r.mean_auroc - base,
                    }),
                    Err(e) => out.note(format!("{} +{} {row}: {e}", test.state, supp.state)),
                }
            }
        }
        let reference = (row.model == ModelKind::Rf).then_some(reference::TRANSFER_NY_PLUS_CA);
        let map = HeatmapResult::new(row.to_string(), states.clone(), cells, reference);
        let mut header = vec!["supplement".to_owned()];
        header.extend(states.iter().cloned());
        header.push("avg".into());
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        out.csv(&format!("matrix__{}.csv", row.slug()), &header, map.matrix_rows())?;
        println!("{row}: change in AUROC (rows: supplement, columns: test)");
        println!("{}", header.join("\t"));
        for r in map.matrix_rows() {
            let r: Vec<String> = r.iter().map(|v| v.parse::<f64>().map_or(v.clone(), |x| format!("{x:+.3}"))).collect();
            println!("{}", r.join("\t"));
        }
        if let (Some(reference), Some(cell)) = (reference, map.get("NY", "CA")) {
            println!("NY +CA: {:+.3} (published on the full corpus: {reference:+.3})", cell.delta);
        }
        maps.push(map);
    }
    let rows = maps.iter().flat_map(|m| {
        m.cells.iter().map(move |c| {
            vec![m.model.clone(), c.test.clone(), c.supplement.clone(), num(c.auroc), num(c.baseline), num(c.delta)]
        })
    });
    out.csv("cells.csv", &["model", "test", "supplement", "auroc", "baseline", "delta"], rows)?;
    out.json("transfer.json", &maps)?;
    out.finish()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heatmap_shape_and_averages() {
        let states: Vec<String> = ["NY", "CA", "TX"].map(String::from).to_vec();
        let mut cells = Vec::new();
        for t in &states {
            for s in states.iter().filter(|s| *s != t) {
                let delta = if s == "CA" { -0.2 } else { 0.1 };
                cells.push(TransferCell {
                    test: t.clone(),
                    supplement: s.clone(),
                    auroc: 0.5 + delta,
                    baseline: 0.5,
                    delta,
                });
            }
        }
        let map = HeatmapResult::new("rf@ks:14".into(), states.clone(), cells, None);
        assert_eq!(map.cells.len(), states.len() * states.len() - states.len());
        assert!(map.get("NY", "NY").is_none());
        assert_eq!(map.supplement_avg[1], ("CA".into(), -0.2));
        let rows = map.matrix_rows();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0][1], "", "diagonal is empty");
    }
}
