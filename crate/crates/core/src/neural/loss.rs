use ndarray::{Array1, ArrayView2};
use serde::{Deserialize, Serialize};

use super::net::{sigmoid, NetSpec};
use super::params::Params;
use crate::error::{Error, Result};

/// Probabilities are clamped to `[EPS, 1 - EPS]` before taking logs.
pub const EPS: f64 = 1e-12;

/// Class weighting for the loss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossConfig {
    /// Positive-class fraction of the training labels.
    pub alpha: f64,
}

impl LossConfig {
    pub fn from_labels(y: &[u8]) -> Result<Self> {
        let pos = y.iter().filter(|&&v| v == 1).count();
        if pos == 0 || pos == y.len() {
            return Err(Error::invalid("loss weighting needs both classes"));
        }
        Ok(Self { alpha: pos as f64 / y.len() as f64 })
    }
}

fn clamp(p: f64) -> f64 {
    p.clamp(EPS, 1.0 - EPS)
}

/// Unweighted binary cross-entropy in bits.
pub fn bce(y: &[u8], p: &[f64]) -> f64 {
    let total: f64 = y
        .iter()
        .zip(p)
        .map(|(&t, &q)| {
            let q = clamp(q);
            if t == 1 {
                q.log2()
            } else {
                (1.0 - q).log2()
            }
        })
        .sum();
    -total / y.len() as f64
}

/// Cross-entropy in bits with positives weighted by `1 - alpha` and
/// negatives by `alpha`.
pub fn weighted_bce(y: &[u8], p: &[f64], alpha: f64) -> f64 {
    let total: f64 = y
        .iter()
        .zip(p)
        .map(|(&t, &q)| {
            let q = clamp(q);
            if t == 1 {
                (1.0 - alpha) * q.log2()
            } else {
                alpha * (1.0 - q).log2()
            }
        })
        .sum();
    -total / y.len() as f64
}

/// Per-row derivative of the mean weighted loss with respect to the logit.
/// Zero where the clamp is active.
fn dloss_dz(y: &[u8], z: &Array1<f64>, alpha: f64) -> Array1<f64> {
    let n = y.len() as f64;
    let ln2 = std::f64::consts::LN_2;
    Array1::from_iter(y.iter().zip(z).map(|(&t, &zi)| {
        let p = sigmoid(zi);
        if !(EPS..=1.0 - EPS).contains(&p) {
            0.0
        } else if t == 1 {
            -(1.0 - alpha) * (1.0 - p) / (ln2 * n)
        } else {
            alpha * p / (ln2 * n)
        }
    }))
}

/// Mean weighted loss over a batch and its gradient.
pub fn loss_and_grad(
    spec: &NetSpec,
    params: &Params,
    x: ArrayView2<f64>,
    y: &[u8],
    loss: &LossConfig,
) -> Result<(f64, Params)> {
    spec.check(params)?;
    spec.check_input(x)?;
    if y.len() != x.nrows() || y.is_empty() {
        return Err(Error::Shape { expected: x.nrows(), got: y.len() });
    }
    let (z, cache) = spec.logits(params, x);
    let p: Vec<f64> = z.iter().map(|&v| sigmoid(v)).collect();
    let value = weighted_bce(y, &p, loss.alpha);
    let dz = dloss_dz(y, &z, loss.alpha);
    Ok((value, spec.backward(params, x, &cache, &dz)))
}
