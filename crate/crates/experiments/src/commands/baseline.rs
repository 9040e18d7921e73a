use anyhow::Result;
use serde::Serialize;
use statecast::eval::EvalReport;

use super::{evaluate, fmt_score, load_required, summary_cols, SUMMARY_HEADER};
use crate::output::opt;
use crate::reference::{self, Cell};
use crate::Context;

#[derive(Debug, Serialize)]
struct GridCell {
    state: String,
    row: String,
    report: Option<EvalReport>,
    error: Option<String>,
    reference: Option<Cell>,
}

pub fn run(ctx: &Context) -> Result<()> {
    let (datasets, missing) = load_required(ctx)?;
    let refs: Vec<_> = datasets.iter().collect();
    let mut out = ctx.output("baseline", &refs)?;
    for m in &missing {
        out.note(format!("skipped {m}: no dataset"));
    }

    let mut cells = Vec::new();
    for row in &ctx.cfg.baseline_rows {
        for ds in &datasets {
            let reference = reference::baseline(&row.to_string(), &ds.state).map(Cell::from);
            match evaluate(ctx, ds, row) {
                Ok(report) => {
                    out.note(format!("{} {row}: {:.4}", ds.state, report.mean_auroc));
                    out.predictions(&format!("predictions/{}__{}.csv", ds.state, row.slug()), &report)?;
                    cells.push(GridCell {
                        state: ds.state.clone(),
                        row: row.to_string(),
                        report: Some(report),
                        error: None,
                        reference,
                    });
                }
                Err(e) => {
                    out.note(format!("{} {row}: {e}", ds.state));
                    cells.push(GridCell {
                        state: ds.state.clone(),
                        row: row.to_string(),
                        report: None,
                        error: Some(e.to_string()),
                        reference,
                    });
                }
            }
        }
    }

    let mut header = vec!["state", "row", "model"];
    header.extend(SUMMARY_HEADER);
    header.extend(["reference_mean", "reference_std"]);
    let rows: Vec<Vec<String>> = cells
        .iter()
        .filter_map(|c| {
            let r = c.report.as_ref()?;
            let mut cols = vec![c.state.clone(), c.row.clone(), r.model_name.clone()];
            cols.extend(summary_cols(r));
            cols.push(opt(c.reference.as_ref().map(|x| x.mean)));
            cols.push(opt(c.reference.as_ref().map(|x| x.std)));
            Some(cols)
        })
        .collect();
    out.csv("baseline.csv", &header, rows)?;
    out.json("baseline.json", &cells)?;

    println!("mean AUROC ± std across folds (published value on the full corpus in brackets)");
    for row in &ctx.cfg.baseline_rows {
        let mut line = format!("{:<20}", row.to_string());
        for c in cells.iter().filter(|c| c.row == row.to_string()) {
            let ours = c.report.as_ref().map_or("error".into(), |r| fmt_score(r.mean_auroc, r.std_across_folds));
            let theirs = c.reference.as_ref().map_or(String::new(), |x| format!(" [{}]", fmt_score(x.mean, x.std)));
            line.push_str(&format!("  {} {ours}{theirs}", c.state));
        }
        println!("{line}");
    }
    out.finish()?;
    Ok(())
}
