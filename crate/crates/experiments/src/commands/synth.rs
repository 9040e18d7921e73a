use anyhow::{Context as _, Result};
use serde::Serialize;
use statecast::ingest::{synth_generate, synth_incidents, write_incidents, LocationDataset, Signal, SynthConfig};

use crate::config::SignalKind;
use crate::data::{dataset_path, INCIDENTS_FILE};
use crate::output::num;
use crate::Context;

#[derive(Debug, Serialize)]
pub struct DatasetSummary {
    pub state: String,
    pub n: usize,
    pub m: usize,
    pub positives: usize,
    pub imbalance: f64,
}

impl From<&LocationDataset> for DatasetSummary {
    fn from(ds: &LocationDataset) -> Self {
        DatasetSummary {
            state: ds.state.clone(),
            n: ds.n_days(),
            m: ds.n_features(),
            positives: ds.positives(),
            imbalance: ds.imbalance(),
        }
    }
}

pub(crate) fn print_summaries(rows: &[DatasetSummary]) {
    println!("{:<6} {:>6} {:>5} {:>9} {:>9}", "state", "n", "m", "positives", "imbalance");
    for r in rows {
        println!("{:<6} {:>6} {:>5} {:>9} {:>9.4}", r.state, r.n, r.m, r.positives, r.imbalance);
    }
}

pub(crate) fn summary_rows(rows: &[DatasetSummary]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|r| vec![r.state.clone(), r.n.to_string(), r.m.to_string(), r.positives.to_string(), num(r.imbalance)])
        .collect()
}

pub fn config(ctx: &Context) -> SynthConfig {
    let s = &ctx.cfg.synth;
    let signal = match s.signal {
        SignalKind::None => Signal::None,
        SignalKind::Planted => Signal::Planted {
            window_len: s.window_len,
            affected_fraction: s.affected_fraction,
            shift: s.shift,
            group: s.group,
        },
    };
    SynthConfig {
        n_days: s.days,
        m_features: s.features,
        n_states: s.states,
        imbalance: s.imbalance,
        signal,
        seed: ctx.cfg.seed,
        start: s.start,
    }
}

pub fn run(ctx: &Context) -> Result<()> {
    let config = config(ctx);
    let datasets = synth_generate(&config)?;
    let refs: Vec<&LocationDataset> = datasets.iter().collect();
    let mut out = ctx.output("synth", &refs)?;
    let dir = ctx.data_dir();
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let comment = format!("command=synth fingerprint={}", out.fingerprint());
    for ds in &datasets {
        ds.write_csv(dataset_path(&dir, &ds.state), Some(&comment))?;
        out.note(format!("wrote {}", dataset_path(&dir, &ds.state).display()));
    }
    let incidents = synth_incidents(&config, &datasets);
    let path = dir.join(INCIDENTS_FILE);
    let file = std::fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    write_incidents(std::io::BufWriter::new(file), &incidents)?;

    let summaries: Vec<DatasetSummary> = datasets.iter().map(DatasetSummary::from).collect();
    out.csv("summary.csv", &["state", "n", "m", "positives", "imbalance"], summary_rows(&summaries))?;
    out.json("summary.json", &summaries)?;
    print_summaries(&summaries);
    println!("{} synthetic incidents; datasets in {}", incidents.len(), dir.display());
    out.finish()?;
    Ok(())
}
