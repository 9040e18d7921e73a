use anyhow::{bail, Context as _, Result};
use serde::Serialize;
use statecast::ingest::{
    build_daily_features, date_range, label_vector, parse_incidents, parse_news_file, write_incidents, IncidentStats,
    LocationDataset, NewsFormat, ParseStats, Registry,
};

use super::synth::{print_summaries, summary_rows, DatasetSummary};
use crate::data::{dataset_path, INCIDENTS_FILE};
use crate::Context;

#[derive(Debug, Serialize)]
struct IngestReport {
    gkg: ParseStats,
    events: ParseStats,
    incidents: IncidentStats,
    incidents_in_range: usize,
    out_of_range_records: usize,
    datasets: Vec<DatasetSummary>,
}

pub fn run(ctx: &Context) -> Result<()> {
    let settings = &ctx.cfg.ingest;
    if settings.gkg.is_empty() && settings.events.is_empty() {
        bail!("set ingest.gkg and/or ingest.events to one or more news files");
    }
    let incidents_path = settings.incidents.as_ref().context("set ingest.incidents to an incident file")?;

    let mut records = Vec::new();
    let mut gkg = ParseStats::default();
    for path in &settings.gkg {
        let (recs, stats) = parse_news_file(path, NewsFormat::Gkg)?;
        gkg.merge(stats);
        records.extend(recs);
    }
    let mut events = ParseStats::default();
    for path in &settings.events {
        let (recs, stats) = parse_news_file(path, NewsFormat::Events)?;
        events.merge(stats);
        records.extend(recs);
    }
    let (incidents, inc_stats) = parse_incidents(incidents_path)?;
    let incidents: Vec<_> =
        incidents.into_iter().filter(|i| i.date >= settings.start && i.date <= settings.end).collect();

    let registry = Registry::canonical();
    let dates = date_range(settings.start, settings.end);
    let mut datasets = Vec::new();
    let mut out_of_range = 0;
    for state in &ctx.cfg.states {
        let (x, skipped) = build_daily_features(&records, state, settings.start, settings.end, &registry);
        out_of_range += skipped;
        let y = label_vector(&incidents, state, &dates);
        datasets.push(LocationDataset::new(state.as_str(), dates.clone(), x, y, registry.feature_ids())?);
    }

    let refs: Vec<&LocationDataset> = datasets.iter().collect();
    let mut out = ctx.output("ingest", &refs)?;
    let dir = ctx.data_dir();
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let comment = format!("command=ingest fingerprint={}", out.fingerprint());
    for ds in &datasets {
        ds.write_csv(dataset_path(&dir, &ds.state), Some(&comment))?;
    }
    let path = dir.join(INCIDENTS_FILE);
    let file = std::fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    write_incidents(std::io::BufWriter::new(file), &incidents)?;
    out.note(format!(
        "parsed {} knowledge-graph rows ({} malformed), {} event rows ({} malformed), {} incidents",
        gkg.rows, gkg.malformed, events.rows, events.malformed, inc_stats.records
    ));

    let summaries: Vec<DatasetSummary> = datasets.iter().map(DatasetSummary::from).collect();
    out.csv("summary.csv", &["state", "n", "m", "positives", "imbalance"], summary_rows(&summaries))?;
    let report = IngestReport {
        gkg,
        events,
        incidents: inc_stats,
        incidents_in_range: incidents.len(),
        out_of_range_records: out_of_range,
        datasets: summaries,
    };
    out.json("summary.json", &report)?;
    print_summaries(&report.datasets);
    println!(
        "news rows: {} knowledge-graph, {} event; malformed {}; without a US state {}",
        gkg.rows,
        events.rows,
        gkg.malformed + events.malformed,
        gkg.no_state + events.no_state
    );
    out.finish()?;
    Ok(())
}
