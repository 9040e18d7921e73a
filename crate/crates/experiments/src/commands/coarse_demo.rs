use anyhow::Result;

use crate::coarse::{default_counts, demo, read_counts};
use crate::output::num;
use crate::Context;

pub fn run(ctx: &Context) -> Result<()> {
    let counts = match &ctx.cfg.coarse_counts {
        Some(path) => read_counts(path)?,
        None => default_counts(),
    };
    let d = demo(&counts, ctx.cfg.coarse_days, &ctx.cfg.coarse_basis)?;
    let mut out = ctx.output("coarse-demo", &[])?;
    let rows = [
        ("auroc", d.auroc, Some(d.reference_auroc)),
        ("auprc", d.auprc, Some(d.reference_auprc)),
        ("auprc_stable_order", d.auprc_stable_order, None),
        ("baseline_auroc", d.baseline_auroc, Some(d.reference_baseline_auroc)),
        ("baseline_auprc", d.baseline_auprc, Some(d.reference_baseline_auprc)),
    ];
    out.csv(
        "coarse.csv",
        &["metric", "value", "reference"],
        rows.iter().map(|(k, v, r)| vec![k.to_string(), num(*v), r.map(num).unwrap_or_default()]),
    )?;
    out.json("coarse.json", &d)?;
    println!(
        "{} state-days ({} states x {} days), {} positive ({} basis); scored 1: {}",
        d.instances,
        d.states,
        d.days,
        d.positives,
        d.basis,
        d.predicted_states.join(",")
    );
    println!(
        "AUROC {:.4}   (published {:.3}; baseline {:.3}, published {:.3})",
        d.auroc, d.reference_auroc, d.baseline_auroc, d.reference_baseline_auroc
    );
    println!(
        "AUPRC {:.4}   (published {:.3}; baseline {:.4}, published {:.3}) [{}]; stable order {:.4}",
        d.auprc,
        d.reference_auprc,
        d.baseline_auprc,
        d.reference_baseline_auprc,
        d.auprc_convention,
        d.auprc_stable_order
    );
    out.finish()?;
    Ok(())
}
