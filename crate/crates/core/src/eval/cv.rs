//! Purged temporal cross-validation over one state or a pooled group, with
//! optional train-only supplement states.

use std::collections::BTreeSet;

use ndarray::Array2;
use rayon::prelude::*;

use super::folds::{candidate_training_days, check_window_separation, make_folds, purge_rows, Fold};
use super::report::{EvalReport, FoldResult, FoldSummary, Prediction};
use super::spec::{CvConfig, ModelSpec, WindowSpec};
use crate::ensemble::{ada_train, oversample, rf_train};
use crate::error::{Error, Result};
use crate::features::{
    ks_fit_segments, ks_transform, moving_average_matrix, stack, FitSegment, FittedWindows, MinMaxScaler,
    Representation,
};
use crate::ingest::LocationDataset;
use crate::neural::{train, NetSpec};
use crate::rng;
use crate::stats::{auprc, auroc};

/// Extra training-only states.
#[derive(Debug, Clone, Default)]
pub enum Supplements<'a> {
    #[default]
    None,
    Fixed(Vec<&'a LocationDataset>),
    /// Added in order, per fold, until training positives exceed `threshold`.
    UntilPositives {
        ordered: Vec<&'a LocationDataset>,
        threshold: usize,
    },
}

/// States whose rows are both trained and tested on, plus supplements.
#[derive(Debug, Clone)]
pub struct CvInput<'a> {
    pub primary: Vec<&'a LocationDataset>,
    pub supplements: Supplements<'a>,
}

impl<'a> CvInput<'a> {
    pub fn single(ds: &'a LocationDataset) -> Self {
        Self { primary: vec![ds], supplements: Supplements::None }
    }
}

/// One fold's matrices, shared by every repeat.
struct FoldData {
    fold: Fold,
    train_x: Array2<f64>,
    train_y: Vec<u8>,
    /// (dataset, day) per training row.
    train_ids: Vec<(usize, usize)>,
    test_x: Array2<f64>,
    test_y: Vec<u8>,
    test_ids: Vec<(usize, usize)>,
    lookback: usize,
    purged: usize,
    allowed_days: BTreeSet<usize>,
    supplements: Vec<String>,
    fitted: Option<FittedWindows>,
    excluded: Option<String>,
}

/// FNV-1a, used to key seed streams by state.
pub fn state_key(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// Seed for one (state, repeat, fold) model run. It does not depend on the
/// model or window so that equivalent configurations give equal results.
pub fn task_seed(seed: u64, state: &str, repeat: usize, fold: usize) -> u64 {
    rng::derive(seed, &[state_key(state), repeat as u64, fold as u64])
}

pub fn run_cv(ds: &LocationDataset, window: WindowSpec, model: &ModelSpec, cfg: &CvConfig) -> Result<EvalReport> {
    run_cv_input(&CvInput::single(ds), window, model, cfg)
}

pub fn run_cv_input(input: &CvInput<'_>, window: WindowSpec, model: &ModelSpec, cfg: &CvConfig) -> Result<EvalReport> {
    window.validate()?;
    if cfg.repeats == 0 {
        return Err(Error::invalid("at least one repeat is required"));
    }
    let first = *input.primary.first().ok_or_else(|| Error::invalid("no test state"))?;
    let pool: Vec<&LocationDataset> = match &input.supplements {
        Supplements::None => Vec::new(),
        Supplements::Fixed(v) | Supplements::UntilPositives { ordered: v, .. } => v.clone(),
    };
    let all: Vec<&LocationDataset> = input.primary.iter().chain(&pool).copied().collect();
    for ds in &all {
        if ds.feature_ids != first.feature_ids {
            return Err(Error::invalid(format!("feature registry of {} differs from {}", ds.state, first.state)));
        }
        if ds.dates != first.dates {
            return Err(Error::invalid(format!("date index of {} differs from {}", ds.state, first.state)));
        }
    }
    let n = first.n_days();
    if window.width() >= n {
        return Err(Error::Window { window: window.width(), len: n });
    }
    let folds = make_folds(n, cfg.folds)?;
    let label: String = input.primary.iter().map(|d| d.state.as_str()).collect::<Vec<_>>().join("+");

    // representations that do not depend on the fold
    let fixed: Vec<Option<Representation>> = match window {
        WindowSpec::Ks(_) => vec![None; all.len()],
        _ => all.iter().map(|ds| represent(ds, window, None).map(Some)).collect::<Result<_>>()?,
    };

    let fold_data: Vec<FoldData> =
        folds.par_iter().map(|fold| prepare_fold(input, &all, &fixed, fold, window, n)).collect::<Result<_>>()?;

    let tasks: Vec<(usize, usize)> = (0..cfg.repeats)
        .flat_map(|r| fold_data.iter().filter(|f| f.excluded.is_none()).map(move |f| (r, f.fold.index)))
        .collect();
    if tasks.is_empty() {
        return Err(Error::invalid(format!("{label}: every fold was excluded")));
    }
    let outcomes: Vec<(FoldResult, Vec<Prediction>)> = tasks
        .par_iter()
        .map(|&(repeat, f)| run_task(&fold_data[f], &all, model, window, cfg, &label, repeat))
        .collect::<Result<_>>()?;

    let summaries = fold_data
        .into_iter()
        .map(|f| FoldSummary {
            fold: f.fold.index,
            start: first.dates[f.fold.start],
            end: first.dates[f.fold.end],
            n_train: f.train_y.len(),
            n_test: f.test_y.len(),
            train_positives: f.train_y.iter().filter(|&&v| v == 1).count(),
            test_positives: f.test_y.iter().filter(|&&v| v == 1).count(),
            purged: f.purged,
            lookback: f.lookback,
            supplements: f.supplements,
            fitted_windows: f.fitted,
            excluded: f.excluded,
        })
        .collect();
    let (results, predictions): (Vec<_>, Vec<_>) = outcomes.into_iter().unzip();
    let states = input.primary.iter().map(|d| d.state.clone()).collect();
    EvalReport::assemble(states, window, model.clone(), *cfg, summaries, results, predictions.concat())
}

fn represent(ds: &LocationDataset, window: WindowSpec, fitted: Option<&FittedWindows>) -> Result<Representation> {
    match (window, fitted) {
        (WindowSpec::Fixed(d), _) => moving_average_matrix(ds.x.view(), d),
        (WindowSpec::Stacked(d), _) => stack(ds.x.view(), d),
        (WindowSpec::Ks(_), Some(f)) => ks_transform(ds.x.view(), f),
        (WindowSpec::Ks(_), None) => Err(Error::invalid("K-S representation needs fitted windows")),
    }
}

fn positives_on(ds: &LocationDataset, days: &[usize], from: usize) -> usize {
    days.iter().filter(|&&d| d >= from && ds.y[d] == 1).count()
}

fn prepare_fold(
    input: &CvInput<'_>,
    all: &[&LocationDataset],
    fixed: &[Option<Representation>],
    fold: &Fold,
    window: WindowSpec,
    n: usize,
) -> Result<FoldData> {
    let width = window.width();
    let candidates = candidate_training_days(fold, width, n);
    let n_primary = input.primary.len();

    // training datasets: primary states, then supplements chosen for this fold
    let mut train_sets: Vec<usize> = (0..n_primary).collect();
    match &input.supplements {
        Supplements::None => {}
        Supplements::Fixed(v) => train_sets.extend(n_primary..n_primary + v.len()),
        Supplements::UntilPositives { ordered, threshold } => {
            let mut pos: usize = input.primary.iter().map(|ds| positives_on(ds, &candidates, width)).sum();
            for (k, ds) in ordered.iter().enumerate() {
                if pos > *threshold {
                    break;
                }
                train_sets.push(n_primary + k);
                pos += positives_on(ds, &candidates, width);
            }
        }
    }

    let (reps, fitted): (Vec<Option<Representation>>, Option<FittedWindows>) = match window {
        WindowSpec::Ks(max_window) => {
            let segments: Vec<FitSegment<'_>> = train_sets
                .iter()
                .map(|&i| FitSegment { x: all[i].x.view(), y: &all[i].y, rows: &candidates })
                .collect();
            let fitted = ks_fit_segments(&segments, max_window)?;
            let mut reps = vec![None; all.len()];
            for &i in train_sets.iter() {
                reps[i] = Some(represent(all[i], window, Some(&fitted))?);
            }
            (reps, Some(fitted))
        }
        _ => (fixed.to_vec(), None),
    };
    let rep = |i: usize| reps[i].as_ref().expect("representation built for every training set");
    let lookback = rep(0).lookback;

    let m = rep(0).x.ncols();
    let mut train_ids = Vec::new();
    for &i in &train_sets {
        train_ids.extend(candidates.iter().filter(|&&d| d >= rep(i).lookback).map(|&d| (i, d)));
    }
    let test_ids: Vec<(usize, usize)> = (0..n_primary)
        .flat_map(|i| (fold.start..=fold.end).filter(move |&d| d >= lookback).map(move |d| (i, d)))
        .collect();
    let gather = |ids: &[(usize, usize)]| -> (Array2<f64>, Vec<u8>) {
        let mut x = Array2::zeros((ids.len(), m));
        let mut y = Vec::with_capacity(ids.len());
        for (row, &(i, d)) in ids.iter().enumerate() {
            let r = rep(i);
            x.row_mut(row).assign(&r.x.row(r.row_of_day(d).expect("valid day")));
            y.push(all[i].y[d]);
        }
        (x, y)
    };
    let (train_x, train_y) = gather(&train_ids);
    let (test_x, test_y) = gather(&test_ids);

    let train_days: Vec<usize> = train_ids.iter().map(|&(_, d)| d).collect();
    let test_days: Vec<usize> = test_ids.iter().map(|&(_, d)| d).collect();
    let max_lookback = train_sets.iter().map(|&i| rep(i).lookback).max().unwrap_or(lookback);
    check_window_separation(&train_days, &test_days, max_lookback)?;

    let has_both = |y: &[u8]| y.contains(&0) && y.contains(&1);
    let excluded = if test_y.is_empty() {
        Some("no valid test rows".to_owned())
    } else if !has_both(&test_y) {
        Some("test fold lacks one class".to_owned())
    } else if !has_both(&train_y) {
        Some("training rows lack one class".to_owned())
    } else {
        None
    };
    let supplements = train_sets[n_primary..].iter().map(|&i| all[i].state.clone()).collect();
    Ok(FoldData {
        fold: *fold,
        train_x,
        train_y,
        train_ids,
        test_x,
        test_y,
        test_ids,
        lookback,
        purged: purge_rows(fold, width, n).len(),
        allowed_days: candidates.into_iter().collect(),
        supplements,
        fitted,
        excluded,
    })
}

fn run_task(
    f: &FoldData,
    all: &[&LocationDataset],
    model: &ModelSpec,
    window: WindowSpec,
    cfg: &CvConfig,
    label: &str,
    repeat: usize,
) -> Result<(FoldResult, Vec<Prediction>)> {
    let seed = task_seed(cfg.seed, label, repeat, f.fold.index);
    let mut synthetic = 0;
    let scores: Vec<f64> = match model {
        ModelSpec::Random => vec![0.5; f.test_y.len()],
        ModelSpec::Forest(_) | ModelSpec::Boost(_) => {
            let balanced = oversample(f.train_x.view(), &f.train_y, &cfg.smote, &mut rng::stream(seed, &[0]))?;
            check_smote_parents(&balanced.parents, f)?;
            synthetic = balanced.parents.len();
            let model_seed = rng::derive(seed, &[1]);
            match model {
                ModelSpec::Forest(c) => {
                    rf_train(balanced.x.view(), &balanced.y, c, model_seed)?.predict_matrix(f.test_x.view())?
                }
                ModelSpec::Boost(c) => {
                    ada_train(balanced.x.view(), &balanced.y, c, model_seed)?.predict_matrix(f.test_x.view())?
                }
                _ => unreachable!(),
            }
        }
        ModelSpec::Net { arch, optimizer } => {
            let scaler = MinMaxScaler::fit(f.train_x.view())?;
            let tx = scaler.transform(f.train_x.view())?;
            let vx = scaler.transform(f.test_x.view())?;
            let spec = NetSpec::new(*arch, window.depth(), f.train_x.ncols() / window.depth())?;
            train(&spec, tx.view(), &f.train_y, optimizer, rng::derive(seed, &[1]))?.predict(vx.view())?
        }
    };
    let result = FoldResult {
        repeat,
        fold: f.fold.index,
        synthetic_rows: synthetic,
        auroc: auroc(&scores, &f.test_y)?,
        auprc: auprc(&scores, &f.test_y, cfg.ap_convention)?,
    };
    let predictions = f
        .test_ids
        .iter()
        .zip(&scores)
        .map(|(&(i, d), &p)| Prediction {
            repeat,
            fold: f.fold.index,
            state: all[i].state.clone(),
            date: all[i].dates[d],
            y: all[i].y[d],
            p,
        })
        .collect();
    Ok((result, predictions))
}

/// Every SMOTE parent must be an original training row whose day is outside
/// the test fold and its purge zone.
fn check_smote_parents(parents: &[(usize, usize)], f: &FoldData) -> Result<()> {
    for &(a, b) in parents {
        for p in [a, b] {
            let ok = p < f.train_ids.len()
                && f.allowed_days.contains(&f.train_ids[p].1)
                && !f.fold.contains(f.train_ids[p].1);
            if !ok {
                return Err(Error::invalid(format!("SMOTE parent row {p} is not a purged training row")));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::ForestConfig;
    use crate::features::ks_fit_segments;
    use crate::ingest::{synth_generate, Signal, SynthConfig};

    fn data(states: usize, seed: u64) -> Vec<LocationDataset> {
        let cfg = SynthConfig {
            n_days: 300,
            m_features: 8,
            n_states: states,
            imbalance: 0.05,
            signal: Signal::Planted { window_len: 3, affected_fraction: 0.5, shift: 1.5, group: None },
            seed,
            ..Default::default()
        };
        synth_generate(&cfg).unwrap()
    }

    fn cv(repeats: usize) -> CvConfig {
        CvConfig { repeats, seed: 4, ..Default::default() }
    }

    fn rf() -> ModelSpec {
        ModelSpec::Forest(ForestConfig::with_estimators(15))
    }

    #[test]
    fn random_model_scores_half() {
        let ds = &data(1, 1)[0];
        let r = run_cv(ds, WindowSpec::Fixed(1), &ModelSpec::Random, &cv(2)).unwrap();
        assert!(r.results.iter().all(|f| f.auroc == 0.5));
        assert_eq!(r.mean_auroc, 0.5);
        assert_eq!(r.std_across_folds, 0.0);
    }

    #[test]
    fn mean_is_mean_of_included_runs() {
        let ds = &data(1, 2)[0];
        let r = run_cv(ds, WindowSpec::Fixed(3), &rf(), &cv(3)).unwrap();
        let included = r.folds.iter().filter(|f| f.excluded.is_none()).count();
        assert_eq!(r.results.len(), 3 * included);
        let m = r.results.iter().map(|f| f.auroc).sum::<f64>() / r.results.len() as f64;
        assert!((r.mean_auroc - m).abs() < 1e-12);
        assert!(r.predictions.iter().all(|p| (0.0..=1.0).contains(&p.p)));
    }

    #[test]
    fn unit_ks_window_equals_previous_day() {
        let ds = &data(1, 3)[0];
        let a = run_cv(ds, WindowSpec::Ks(1), &rf(), &cv(2)).unwrap();
        let b = run_cv(ds, WindowSpec::Fixed(1), &rf(), &cv(2)).unwrap();
        assert_eq!(a.results, b.results);
        assert_eq!(a.predictions, b.predictions);
    }

    #[test]
    fn fitted_windows_match_refit_on_training_days() {
        let ds = &data(1, 5)[0];
        let r = run_cv(ds, WindowSpec::Ks(6), &ModelSpec::Random, &cv(1)).unwrap();
        for (summary, fold) in r.folds.iter().zip(make_folds(ds.n_days(), 5).unwrap()) {
            let rows = candidate_training_days(&fold, 6, ds.n_days());
            let seg = FitSegment { x: ds.x.view(), y: &ds.y, rows: &rows };
            let refit = ks_fit_segments(&[seg], 6).unwrap();
            assert_eq!(summary.fitted_windows.as_ref(), Some(&refit));
        }
    }

    #[test]
    fn self_supplement_doubles_training_only() {
        let ds = &data(1, 6)[0];
        let base = run_cv(ds, WindowSpec::Fixed(2), &ModelSpec::Random, &cv(1)).unwrap();
        let input = CvInput { primary: vec![ds], supplements: Supplements::Fixed(vec![ds]) };
        let dup = run_cv_input(&input, WindowSpec::Fixed(2), &ModelSpec::Random, &cv(1)).unwrap();
        for (a, b) in base.folds.iter().zip(&dup.folds) {
            assert_eq!(2 * a.n_train, b.n_train);
            assert_eq!(a.n_test, b.n_test);
        }
        assert_eq!(base.predictions, dup.predictions);
    }

    #[test]
    fn supplements_stop_after_threshold() {
        let sets = data(4, 7);
        let ordered: Vec<&LocationDataset> = sets[1..].iter().collect();
        let input =
            CvInput { primary: vec![&sets[0]], supplements: Supplements::UntilPositives { ordered, threshold: 6 } };
        let r = run_cv_input(&input, WindowSpec::Fixed(1), &ModelSpec::Random, &cv(1)).unwrap();
        for f in &r.folds {
            // the last added state is the one that pushed positives past 6
            assert!(f.train_positives > 6 || f.supplements.len() == 3, "{f:?}");
            if let Some(k) = f.supplements.len().checked_sub(1) {
                let without_last: usize = f.train_positives - {
                    let s = sets.iter().find(|d| d.state == f.supplements[k]).unwrap();
                    let fold = make_folds(300, 5).unwrap()[f.fold];
                    candidate_training_days(&fold, 1, 300).iter().filter(|&&d| d >= 1 && s.y[d] == 1).count()
                };
                assert!(without_last <= 6);
            }
        }
    }

    #[test]
    fn mismatched_registry_is_rejected() {
        let sets = data(2, 8);
        let mut other = sets[1].clone();
        other.feature_ids.swap(0, 1);
        let input = CvInput { primary: vec![&sets[0]], supplements: Supplements::Fixed(vec![&other]) };
        assert!(run_cv_input(&input, WindowSpec::Fixed(1), &ModelSpec::Random, &cv(1)).is_err());
    }

    #[test]
    fn report_independent_of_threads() {
        let ds = &data(1, 9)[0];
        let run = |threads| {
            rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| {
                let r = run_cv(ds, WindowSpec::Ks(4), &rf(), &cv(2)).unwrap();
                let mut csv = Vec::new();
                r.write_predictions_csv(&mut csv, None).unwrap();
                (serde_json::to_string(&r).unwrap(), csv)
            })
        };
        assert_eq!(run(1), run(6));
    }

    #[test]
    fn single_class_fold_is_excluded() {
        let mut ds = data(1, 10).remove(0);
        // clear every positive in the last fold
        for d in 240..300 {
            ds.y[d] = 0;
        }
        let r = run_cv(&ds, WindowSpec::Fixed(1), &ModelSpec::Random, &cv(1)).unwrap();
        let excluded = r.exclusions();
        assert!(excluded.contains(&(4, "test fold lacks one class")));
        assert!(r.results.iter().all(|f| excluded.iter().all(|e| e.0 != f.fold)));
    }
}
