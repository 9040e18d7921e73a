use ndarray::ArrayView2;

use super::loss::{loss_and_grad, weighted_bce, LossConfig};
use super::net::NetSpec;
use super::params::Params;
use crate::error::Result;

pub const STEP: f64 = 1e-5;

/// Relative error below this magnitude is measured against it instead.
const FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradCheck {
    pub max_rel_error: f64,
    pub worst_index: usize,
    pub checked: usize,
}

/// Compares the analytic gradient of the mean weighted loss with central
/// differences for every parameter.
pub fn gradient_check(
    spec: &NetSpec,
    params: &Params,
    x: ArrayView2<f64>,
    y: &[u8],
    loss: &LossConfig,
) -> Result<GradCheck> {
    let (_, analytic) = loss_and_grad(spec, params, x, y, loss)?;
    let value = |p: &Params| -> Result<f64> { Ok(weighted_bce(y, &spec.forward(p, x)?, loss.alpha)) };
    let mut probe = params.clone();
    let mut worst = GradCheck { max_rel_error: 0.0, worst_index: 0, checked: params.len() };
    for i in 0..params.len() {
        let base = params.get(i);
        probe.set(i, base + STEP);
        let up = value(&probe)?;
        probe.set(i, base - STEP);
        let down = value(&probe)?;
        probe.set(i, base);
        let numeric = (up - down) / (2.0 * STEP);
        let a = analytic.get(i);
        let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(FLOOR);
        if rel > worst.max_rel_error {
            worst.max_rel_error = rel;
            worst.worst_index = i;
        }
    }
    Ok(worst)
}
