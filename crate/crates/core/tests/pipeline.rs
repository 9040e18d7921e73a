use statecast::ensemble::{BoostConfig, ForestConfig};
use statecast::eval::{run_cv, CvConfig, ModelSpec, WindowSpec};
use statecast::features::{aggregate_dataset, propagate_dataset};
use statecast::ingest::{synth_generate, Signal, SynthConfig};
use statecast::neural::NetProfile;

fn planted(seed: u64) -> SynthConfig {
    SynthConfig {
        n_days: 400,
        m_features: 12,
        imbalance: 0.05,
        signal: Signal::Planted { window_len: 5, affected_fraction: 0.5, shift: 3.0, group: None },
        seed,
        ..Default::default()
    }
}

#[test]
fn every_model_family_runs_end_to_end() {
    let ds = synth_generate(&planted(1)).unwrap().remove(0);
    let cv = CvConfig { repeats: 1, ..Default::default() };
    let net_opt =
        || statecast::neural::OptimizerConfig { learning_rate: 0.05, epochs: 5, ..NetProfile::Desk.optimizer() };
    let cases = [
        (WindowSpec::Ks(7), ModelSpec::Forest(ForestConfig::with_estimators(40))),
        (WindowSpec::Fixed(7), ModelSpec::Boost(BoostConfig { iterations: 40 })),
        (WindowSpec::Stacked(3), ModelSpec::Net { arch: NetProfile::Desk.ffnn(1), optimizer: net_opt() }),
        (WindowSpec::Ks(7), ModelSpec::Net { arch: NetProfile::Desk.ffnn(2), optimizer: net_opt() }),
        (
            WindowSpec::Stacked(3),
            ModelSpec::Net { arch: NetProfile::Desk.recurrent(statecast::neural::Cell::Gated), optimizer: net_opt() },
        ),
    ];
    let mut aurocs = Vec::new();
    for (window, model) in cases {
        let report = run_cv(&ds, window, &model, &cv).unwrap();
        assert!((0.0..=1.0).contains(&report.mean_auroc), "{} {window}", model.name());
        assert_eq!(report.results.len() + report.exclusions().len(), cv.folds);
        aurocs.push(report.mean_auroc);
    }
    assert!(aurocs[0] > 0.75, "forest should find the planted signal: {}", aurocs[0]);
}

#[test]
fn coarsened_datasets_flow_through_cv() {
    let ds = synth_generate(&planted(2)).unwrap().remove(0);
    let cv = CvConfig { repeats: 1, ..Default::default() };
    let model = ModelSpec::Forest(ForestConfig::with_estimators(20));
    let agg = aggregate_dataset(&ds, 3).unwrap();
    assert_eq!(agg.n_days(), ds.n_days() / 3);
    run_cv(&agg, WindowSpec::Fixed(2), &model, &cv).unwrap();
    let prop = propagate_dataset(&ds, 3).unwrap();
    assert!(prop.positives() >= ds.positives());
    run_cv(&prop, WindowSpec::Fixed(2), &model, &cv).unwrap();
}
