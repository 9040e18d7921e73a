//! Tree ensembles and minority oversampling.

mod boost;
mod forest;
mod smote;
mod tree;

pub use boost::{ada_predict, ada_train, ada_train_traced, stump_alpha, BoostConfig, BoostModel, BoostStep, MAX_ALPHA};
pub use forest::{rf_predict, rf_train, ForestConfig, ForestModel};
pub use smote::{oversample, smote, Oversampled, SmoteConfig};
pub use tree::{gini, tree_train, Node, Tree, TreeParams};

use ndarray::ArrayView2;

use crate::error::{Error, Result};

fn check_training_set(x: ArrayView2<f64>, y: &[u8]) -> Result<()> {
    if y.len() != x.nrows() {
        return Err(Error::Shape { expected: x.nrows(), got: y.len() });
    }
    if x.ncols() == 0 {
        return Err(Error::invalid("training matrix has no columns"));
    }
    let n1 = y.iter().filter(|&&v| v == 1).count();
    if n1 == 0 || n1 == y.len() {
        return Err(Error::invalid("training labels contain a single class"));
    }
    Ok(())
}
