use ndarray::ArrayView2;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use serde::{Deserialize, Serialize};

use super::check_training_set;
use super::tree::{tree_train, Tree, TreeParams};
use crate::error::{Error, Result};
use crate::rng;

/// Stump weight used when a stump makes no weighted error; equal to the
/// weight at `ε = 2.06e-9`.
pub const MAX_ALPHA: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoostConfig {
    /// Attempts, including discarded ones.
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostModel {
    pub stumps: Vec<(Tree, f64)>,
    /// Attempts actually made (fewer than configured after a perfect stump).
    pub iterations_run: usize,
    pub seed: u64,
    pub n_features: usize,
}

/// One boosting attempt.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoostStep {
    pub epsilon: f64,
    /// `None` when the stump was discarded.
    pub alpha: Option<f64>,
    /// Sum of the distribution after the step.
    pub weight_sum: f64,
    /// Mass on rows the stump misclassifies, after the update.
    pub misclassified_mass: f64,
}

/// `½ ln((1 - ε) / ε)`, capped at [`MAX_ALPHA`].
pub fn stump_alpha(epsilon: f64) -> f64 {
    if epsilon <= 0.0 {
        return MAX_ALPHA;
    }
    (0.5 * ((1.0 - epsilon) / epsilon).ln()).min(MAX_ALPHA)
}

pub fn ada_train(x: ArrayView2<f64>, y: &[u8], config: &BoostConfig, seed: u64) -> Result<BoostModel> {
    ada_train_traced(x, y, config, seed).map(|(m, _)| m)
}

/// Resampling AdaBoost. Each attempt draws `n` rows from the current
/// distribution `w`, fits a stump on them and measures its error on the full
/// set under `w`. A stump with `ε >= 0.5` is dropped and the next attempt
/// resamples from the unchanged `w`. A perfect stump gets [`MAX_ALPHA`] and
/// ends training.
pub fn ada_train_traced(
    x: ArrayView2<f64>,
    y: &[u8],
    config: &BoostConfig,
    seed: u64,
) -> Result<(BoostModel, Vec<BoostStep>)> {
    check_training_set(x, y)?;
    let (n, m) = x.dim();
    let params = TreeParams { subspace: m, max_depth: Some(1) };
    let sign: Vec<f64> = y.iter().map(|&v| if v == 1 { 1.0 } else { -1.0 }).collect();
    let mut w = vec![1.0 / n as f64; n];
    let mut stumps = Vec::new();
    let mut trace = Vec::with_capacity(config.iterations);
    let mut r = rng::stream(seed, &[]);

    for _ in 0..config.iterations {
        let dist = WeightedIndex::new(&w).map_err(|e| Error::invalid(format!("boosting distribution: {e}")))?;
        let rows: Vec<usize> = (0..n).map(|_| dist.sample(&mut r)).collect();
        let stump = tree_train(x, y, &rows, &params, &mut r);
        let h: Vec<f64> = x.outer_iter().map(|row| vote(&stump, &row.to_vec())).collect();
        let wrong: Vec<bool> = h.iter().zip(&sign).map(|(a, b)| a != b).collect();
        let epsilon: f64 = w.iter().zip(&wrong).filter(|(_, &bad)| bad).map(|(wi, _)| wi).sum();

        if epsilon >= 0.5 {
            trace.push(BoostStep { epsilon, alpha: None, weight_sum: w.iter().sum(), misclassified_mass: epsilon });
            continue;
        }
        let alpha = stump_alpha(epsilon);
        stumps.push((stump, alpha));
        if epsilon == 0.0 {
            trace.push(BoostStep { epsilon, alpha: Some(alpha), weight_sum: w.iter().sum(), misclassified_mass: 0.0 });
            break;
        }
        for i in 0..n {
            w[i] *= (-alpha * sign[i] * h[i]).exp();
        }
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|v| *v /= total);
        trace.push(BoostStep {
            epsilon,
            alpha: Some(alpha),
            weight_sum: w.iter().sum(),
            misclassified_mass: w.iter().zip(&wrong).filter(|(_, &bad)| bad).map(|(wi, _)| wi).sum(),
        });
    }
    if stumps.is_empty() {
        log::warn!("AdaBoost kept no stumps; predictions are constant 0.5");
    }
    let model = BoostModel { stumps, iterations_run: trace.len(), seed, n_features: m };
    Ok((model, trace))
}

/// Stump vote in {-1, +1}; a leaf at exactly 0.5 votes negative.
fn vote(stump: &Tree, row: &[f64]) -> f64 {
    if stump.predict(row) > 0.5 {
        1.0
    } else {
        -1.0
    }
}

impl BoostModel {
    /// Logistic of the normalised margin `Σ α h(x) / Σ α`.
    pub fn predict(&self, row: &[f64]) -> f64 {
        let total: f64 = self.stumps.iter().map(|s| s.1).sum();
        if total == 0.0 {
            return 0.5;
        }
        let margin = self.stumps.iter().map(|(s, a)| a * vote(s, row)).sum::<f64>() / total;
        1.0 / (1.0 + (-margin).exp())
    }

    pub fn predict_matrix(&self, x: ArrayView2<f64>) -> Result<Vec<f64>> {
        if x.ncols() != self.n_features {
            return Err(Error::Shape { expected: self.n_features, got: x.ncols() });
        }
        Ok(x.outer_iter().map(|row| self.predict(&row.to_vec())).collect())
    }
}

pub fn ada_predict(model: &BoostModel, row: &[f64]) -> f64 {
    model.predict(row)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn alpha_at_quarter_error() {
        assert_eq!(stump_alpha(0.25), 0.5 * 3f64.ln());
        assert!((stump_alpha(0.25) - 0.5493).abs() < 1e-4);
        assert_eq!(stump_alpha(0.0), MAX_ALPHA);
    }

    #[test]
    fn update_invariants() {
        let mut r = ChaCha8Rng::seed_from_u64(11);
        let x = Array2::from_shape_fn((200, 4), |_| r.random::<f64>());
        let y: Vec<u8> =
            x.rows().into_iter().map(|row| (row[0] * row[1] + 0.2 * r.random::<f64>() > 0.3) as u8).collect();
        let (model, trace) = ada_train_traced(x.view(), &y, &BoostConfig { iterations: 40 }, 5).unwrap();
        assert!(!model.stumps.is_empty());
        for step in &trace {
            assert!((step.weight_sum - 1.0).abs() < 1e-10);
            if step.alpha.is_some() && step.epsilon > 0.0 {
                assert!((step.misclassified_mass - 0.5).abs() < 1e-10, "{step:?}");
            }
        }
        assert!(model.stumps.iter().all(|s| s.1 > 0.0 && s.1.is_finite()));
    }

    #[test]
    fn perfect_stump_stops_early() {
        let x = array![[0.0], [1.0], [2.0], [3.0]];
        let (model, trace) = ada_train_traced(x.view(), &[0, 0, 1, 1], &BoostConfig { iterations: 10 }, 0).unwrap();
        assert_eq!(trace.last().unwrap().alpha, Some(MAX_ALPHA));
        assert_eq!(model.iterations_run, trace.len());
        assert!(model.predict(&[3.0]) > model.predict(&[0.0]));
    }

    #[test]
    fn deterministic() {
        let x = Array2::from_shape_fn((50, 3), |(i, j)| ((i * 13 + j * 7) % 17) as f64);
        let y: Vec<u8> = (0..50).map(|i| (i % 4 == 0) as u8).collect();
        let a = ada_train(x.view(), &y, &BoostConfig { iterations: 15 }, 8).unwrap();
        let b = ada_train(x.view(), &y, &BoostConfig { iterations: 15 }, 8).unwrap();
        assert_eq!(a, b);
    }
}
