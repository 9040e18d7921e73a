use serde::{Deserialize, Serialize};

use super::params::Params;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub learning_rate: f64,
    /// Inverse-time decay: the rate at step `t` is `lr / (1 + decay * t)`.
    pub decay: f64,
    pub momentum: f64,
    pub batch_size: usize,
    pub epochs: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self { learning_rate: 1e-4, decay: 1e-6, momentum: 0.9, batch_size: 32, epochs: 100 }
    }
}

impl OptimizerConfig {
    pub fn rate_at(&self, iteration: u64) -> f64 {
        self.learning_rate / (1.0 + self.decay * iteration as f64)
    }
}

/// Nesterov momentum: the gradient is taken at the look-ahead point
/// `θ + μv`, then `v ← μv - lr_t g` and `θ ← θ + v`.
#[derive(Debug, Clone)]
pub struct Nesterov {
    pub config: OptimizerConfig,
    pub velocity: Params,
    pub iteration: u64,
}

impl Nesterov {
    pub fn new(config: OptimizerConfig, params: &Params) -> Self {
        Self { config, velocity: params.zeros_like(), iteration: 0 }
    }

    /// One update. `grad` returns `(loss, gradient)` at the point it is
    /// given; the look-ahead loss is returned.
    pub fn step<F>(&mut self, params: &mut Params, mut grad: F) -> Result<f64>
    where
        F: FnMut(&Params) -> Result<(f64, Params)>,
    {
        let mu = self.config.momentum;
        let mut ahead = params.clone();
        ahead.add_scaled(mu, &self.velocity);
        let (loss, g) = grad(&ahead)?;
        let lr = self.config.rate_at(self.iteration);
        self.velocity.scale(mu);
        self.velocity.add_scaled(-lr, &g);
        params.add_scaled(1.0, &self.velocity);
        self.iteration += 1;
        Ok(loss)
    }
}
