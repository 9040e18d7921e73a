use std::collections::BTreeMap;
use std::io::Write;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::spec::{CvConfig, ModelSpec, WindowSpec};
use crate::error::{Error, Result};
use crate::features::FittedWindows;
use crate::stats::{mean, std_dev};

/// Metrics of one (repeat, fold) run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub repeat: usize,
    pub fold: usize,
    pub synthetic_rows: usize,
    pub auroc: f64,
    pub auprc: f64,
}

/// Layout of one fold, shared by all repeats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldSummary {
    pub fold: usize,
    pub start: NaiveDate,
    pub end: NaiveDate,
    pub n_train: usize,
    pub n_test: usize,
    pub train_positives: usize,
    pub test_positives: usize,
    pub purged: usize,
    pub lookback: usize,
    pub supplements: Vec<String>,
    pub fitted_windows: Option<FittedWindows>,
    pub excluded: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub repeat: usize,
    pub fold: usize,
    pub state: String,
    pub date: NaiveDate,
    pub y: u8,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldStat {
    pub fold: usize,
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub states: Vec<String>,
    pub model_name: String,
    pub window: WindowSpec,
    pub model: ModelSpec,
    pub cv: CvConfig,
    pub conventions: BTreeMap<String, String>,
    /// SHA-256 over states, window, model and CV settings.
    pub fingerprint: String,
    pub mean_auroc: f64,
    /// Population std of per-fold means (each averaged over repeats).
    pub std_across_folds: f64,
    /// Population std of per-repeat means (each averaged over folds).
    pub std_across_repeats: f64,
    pub mean_auprc: f64,
    pub per_fold: Vec<FoldStat>,
    pub folds: Vec<FoldSummary>,
    pub results: Vec<FoldResult>,
    #[serde(skip)]
    pub predictions: Vec<Prediction>,
}

pub fn conventions(cv: &CvConfig) -> BTreeMap<String, String> {
    [
        ("auroc", "Mann-Whitney on midranks; tied scores count one half"),
        ("std", "population (divide by n)"),
        ("purge", "training day d dropped iff start - width <= d <= end + width"),
        ("folds", "contiguous; leftover days to the earliest folds"),
        ("repeats", "vary model randomness only"),
        ("lr_decay", "inverse time: lr / (1 + decay * step)"),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_owned(), v.to_owned()))
    .chain([("auprc".to_owned(), cv.ap_convention.as_str().to_owned())])
    .collect()
}

/// Hex SHA-256 of a serialisable configuration.
pub fn fingerprint<T: Serialize>(config: &T) -> Result<String> {
    let bytes = serde_json::to_vec(config)?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

impl EvalReport {
    pub(crate) fn assemble(
        states: Vec<String>,
        window: WindowSpec,
        model: ModelSpec,
        cv: CvConfig,
        folds: Vec<FoldSummary>,
        results: Vec<FoldResult>,
        predictions: Vec<Prediction>,
    ) -> Result<Self> {
        let fp = fingerprint(&(&states, window, &model, cv))?;
        let aurocs: Vec<f64> = results.iter().map(|r| r.auroc).collect();
        let mut by_fold: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        let mut by_repeat: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        for r in &results {
            by_fold.entry(r.fold).or_default().push(r.auroc);
            by_repeat.entry(r.repeat).or_default().push(r.auroc);
        }
        let per_fold: Vec<FoldStat> =
            by_fold.iter().map(|(&fold, v)| FoldStat { fold, mean: mean(v), std: std_dev(v) }).collect();
        let fold_means: Vec<f64> = per_fold.iter().map(|f| f.mean).collect();
        let repeat_means: Vec<f64> = by_repeat.values().map(|v| mean(v)).collect();
        Ok(Self {
            model_name: model.name().to_owned(),
            conventions: conventions(&cv),
            fingerprint: fp,
            mean_auroc: mean(&aurocs),
            std_across_folds: std_dev(&fold_means),
            std_across_repeats: std_dev(&repeat_means),
            mean_auprc: mean(&results.iter().map(|r| r.auprc).collect::<Vec<_>>()),
            per_fold,
            states,
            window,
            model,
            cv,
            folds,
            results,
            predictions,
        })
    }

    /// Folds left out of the mean, with reasons.
    pub fn exclusions(&self) -> Vec<(usize, &str)> {
        self.folds.iter().filter_map(|f| f.excluded.as_deref().map(|r| (f.fold, r))).collect()
    }

    /// Test-day probabilities averaged over repeats, in (state, date) order.
    pub fn mean_predictions(&self) -> Vec<Prediction> {
        let mut acc: BTreeMap<(String, NaiveDate), (u8, usize, f64, f64)> = BTreeMap::new();
        for p in &self.predictions {
            let e = acc.entry((p.state.clone(), p.date)).or_insert((p.y, p.fold, 0.0, 0.0));
            e.2 += p.p;
            e.3 += 1.0;
        }
        acc.into_iter()
            .map(|((state, date), (y, fold, sum, count))| Prediction {
                repeat: 0,
                fold,
                state,
                date,
                y,
                p: sum / count,
            })
            .collect()
    }

    /// `repeat,fold,state,date,y,p` rows after an optional `# comment` line.
    pub fn write_predictions_csv<W: Write>(&self, mut w: W, comment: Option<&str>) -> Result<()> {
        let io = |e| Error::io("<predictions>", e);
        if let Some(c) = comment {
            writeln!(w, "# {c}").map_err(io)?;
        }
        writeln!(w, "repeat,fold,state,date,y,p").map_err(io)?;
        for p in &self.predictions {
            writeln!(w, "{},{},{},{},{},{}", p.repeat, p.fold, p.state, p.date, p.y, p.p).map_err(io)?;
        }
        Ok(())
    }
}
