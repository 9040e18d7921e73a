use ndarray::ArrayView2;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::check_training_set;
use super::tree::{tree_train, Tree, TreeParams};
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestConfig {
    pub estimators: usize,
    /// Features per node; `None` means `ceil(sqrt(m))`.
    pub subspace: Option<usize>,
    /// Turning this off trains every tree on the rows as given.
    pub bootstrap: bool,
}

impl ForestConfig {
    pub fn with_estimators(estimators: usize) -> Self {
        Self { estimators, subspace: None, bootstrap: true }
    }

    pub fn subspace_for(&self, m: usize) -> usize {
        self.subspace.unwrap_or_else(|| (m as f64).sqrt().ceil() as usize).clamp(1, m.max(1))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub trees: Vec<Tree>,
    pub seeds: Vec<u64>,
    pub subspace: usize,
    pub n_features: usize,
    pub config: ForestConfig,
}

/// Trains `config.estimators` unpruned trees, each from its own seed stream,
/// in parallel. Output does not depend on the thread count.
pub fn rf_train(x: ArrayView2<f64>, y: &[u8], config: &ForestConfig, seed: u64) -> Result<ForestModel> {
    check_training_set(x, y)?;
    if config.estimators == 0 {
        return Err(Error::invalid("forest needs at least one estimator"));
    }
    let (n, m) = x.dim();
    let params = TreeParams { subspace: config.subspace_for(m), max_depth: None };
    let seeds: Vec<u64> = (0..config.estimators as u64).map(|t| rng::derive(seed, &[t])).collect();
    let trees = seeds
        .par_iter()
        .map(|&s| {
            let mut r = rng::stream(s, &[]);
            let rows: Vec<usize> =
                if config.bootstrap { (0..n).map(|_| r.random_range(0..n)).collect() } else { (0..n).collect() };
            tree_train(x, y, &rows, &params, &mut r)
        })
        .collect();
    Ok(ForestModel { trees, seeds, subspace: params.subspace, n_features: m, config: config.clone() })
}

impl ForestModel {
    /// Mean class-1 leaf probability over trees.
    pub fn predict(&self, row: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.predict(row)).sum::<f64>() / self.trees.len() as f64
    }

    pub fn predict_matrix(&self, x: ArrayView2<f64>) -> Result<Vec<f64>> {
        if x.ncols() != self.n_features {
            return Err(Error::Shape { expected: self.n_features, got: x.ncols() });
        }
        Ok((0..x.nrows()).into_par_iter().map(|i| self.predict(&x.row(i).to_vec())).collect())
    }
}

pub fn rf_predict(model: &ForestModel, row: &[f64]) -> f64 {
    model.predict(row)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn toy(n: usize, seed: u64) -> (Array2<f64>, Vec<u8>) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let x = Array2::from_shape_fn((n, 5), |_| r.random::<f64>());
        let y = x.rows().into_iter().map(|row| (row[0] + 0.3 * row[2] > 0.7) as u8).collect();
        (x, y)
    }

    #[test]
    fn single_tree_without_bootstrap_matches_tree() {
        let (x, y) = toy(60, 1);
        let cfg = ForestConfig { estimators: 1, subspace: Some(5), bootstrap: false };
        let forest = rf_train(x.view(), &y, &cfg, 9).unwrap();
        let rows: Vec<usize> = (0..60).collect();
        let params = TreeParams { subspace: 5, max_depth: None };
        let tree = tree_train(x.view(), &y, &rows, &params, &mut ChaCha8Rng::seed_from_u64(0));
        for row in x.rows() {
            let row = row.to_vec();
            assert_eq!(forest.predict(&row), tree.predict(&row));
        }
    }

    #[test]
    fn prediction_is_mean_of_trees() {
        let (x, y) = toy(80, 2);
        let forest = rf_train(x.view(), &y, &ForestConfig::with_estimators(7), 3).unwrap();
        assert_eq!(forest.subspace, 3);
        for row in x.rows() {
            let row = row.to_vec();
            let manual: f64 = forest.trees.iter().map(|t| t.predict(&row)).sum::<f64>() / 7.0;
            let p = forest.predict(&row);
            assert_eq!(p, manual);
            assert!((0.0..=1.0).contains(&p));
        }
    }

    #[test]
    fn thread_count_does_not_matter() {
        let (x, y) = toy(120, 3);
        let cfg = ForestConfig::with_estimators(24);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| {
                let f = rf_train(x.view(), &y, &cfg, 77).unwrap();
                f.predict_matrix(x.view()).unwrap()
            })
        };
        let one = run(1);
        assert_eq!(
            one.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            run(8).iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn rejects_single_class() {
        let (x, _) = toy(10, 4);
        assert!(rf_train(x.view(), &[0; 10], &ForestConfig::with_estimators(2), 0).is_err());
    }
}
