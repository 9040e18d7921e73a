use std::io::Write;

use ndarray::{ArrayView2, Axis};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::loss::{loss_and_grad, weighted_bce, LossConfig};
use super::net::{Architecture, Cell, NetSpec};
use super::optim::{Nesterov, OptimizerConfig};
use super::params::Params;
use crate::error::{Error, Result};
use crate::rng;

/// Named size presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NetProfile {
    /// Small widths for laptop-scale runs.
    Desk,
    /// Widths and epochs of the original experiments.
    Paper,
}

impl NetProfile {
    pub fn hidden(self) -> usize {
        match self {
            NetProfile::Desk => 64,
            NetProfile::Paper => 8000,
        }
    }

    pub fn recurrent_hidden(self) -> usize {
        match self {
            NetProfile::Desk => 64,
            NetProfile::Paper => 1024,
        }
    }

    pub fn per_feature(self) -> usize {
        8
    }

    pub fn epochs(self) -> usize {
        match self {
            NetProfile::Desk => 50,
            NetProfile::Paper => 100,
        }
    }

    pub fn ffnn(self, layers: u8) -> Architecture {
        if layers >= 2 {
            Architecture::Ffnn2 { hidden: self.hidden(), per_feature: self.per_feature() }
        } else {
            Architecture::Ffnn1 { hidden: self.hidden() }
        }
    }

    pub fn recurrent(self, cell: Cell) -> Architecture {
        Architecture::Recurrent { hidden: self.recurrent_hidden(), cell }
    }

    pub fn optimizer(self) -> OptimizerConfig {
        OptimizerConfig { epochs: self.epochs(), ..OptimizerConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedNet {
    pub spec: NetSpec,
    pub params: Params,
    pub seed: u64,
    pub loss: LossConfig,
    pub optimizer: OptimizerConfig,
    /// Mean weighted training loss after each epoch.
    pub epoch_loss: Vec<f64>,
}

/// Mini-batch training with a seeded initialisation stream and a seeded
/// shuffle stream. Stops with [`Error::Divergence`] on a non-finite loss.
pub fn train(
    spec: &NetSpec,
    x: ArrayView2<f64>,
    y: &[u8],
    optimizer: &OptimizerConfig,
    seed: u64,
) -> Result<TrainedNet> {
    spec.check_input(x)?;
    if y.len() != x.nrows() {
        return Err(Error::Shape { expected: x.nrows(), got: y.len() });
    }
    if optimizer.batch_size == 0 {
        return Err(Error::invalid("batch size must be positive"));
    }
    let loss = LossConfig::from_labels(y)?;
    let mut params = spec.init(&mut rng::stream(seed, &[0]));
    let mut shuffle = rng::stream(seed, &[1]);
    let mut opt = Nesterov::new(*optimizer, &params);
    let mut order: Vec<usize> = (0..x.nrows()).collect();
    let mut epoch_loss = Vec::with_capacity(optimizer.epochs);

    for epoch in 0..optimizer.epochs {
        order.shuffle(&mut shuffle);
        for batch in order.chunks(optimizer.batch_size) {
            let xb = x.select(Axis(0), batch);
            let yb: Vec<u8> = batch.iter().map(|&i| y[i]).collect();
            let l = opt.step(&mut params, |p| loss_and_grad(spec, p, xb.view(), &yb, &loss))?;
            if !l.is_finite() || !params.is_finite() {
                return Err(Error::Divergence { epoch, loss: l });
            }
        }
        let full = weighted_bce(y, &spec.forward(&params, x)?, loss.alpha);
        if !full.is_finite() {
            return Err(Error::Divergence { epoch, loss: full });
        }
        epoch_loss.push(full);
    }
    Ok(TrainedNet { spec: *spec, params, seed, loss, optimizer: *optimizer, epoch_loss })
}

impl TrainedNet {
    pub fn predict(&self, x: ArrayView2<f64>) -> Result<Vec<f64>> {
        self.spec.forward(&self.params, x)
    }

    /// `epoch,loss` rows.
    pub fn write_loss_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let io = |e| Error::io("<epoch loss>", e);
        writeln!(w, "epoch,loss").map_err(io)?;
        for (i, l) in self.epoch_loss.iter().enumerate() {
            writeln!(w, "{},{l}", i + 1).map_err(io)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::auroc;
    use ndarray::Array2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn separable(n: usize, seed: u64) -> (Array2<f64>, Vec<u8>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = Array2::from_shape_fn((n, 4), |_| rng.random_range(0.0..1.0));
        let y = x.rows().into_iter().map(|r| (r[0] - r[1] + 0.5 * r[3] > 0.3) as u8).collect();
        (x, y)
    }

    #[test]
    fn separable_toy_reaches_full_auroc() {
        let (x, y) = separable(120, 1);
        let spec = NetSpec::new(Architecture::Ffnn1 { hidden: 16 }, 1, 4).unwrap();
        let opt = OptimizerConfig { learning_rate: 0.5, decay: 0.0, batch_size: 16, epochs: 100, ..Default::default() };
        let net = train(&spec, x.view(), &y, &opt, 3).unwrap();
        let a = auroc(&net.predict(x.view()).unwrap(), &y).unwrap();
        assert!(a > 0.99, "training AUROC {a}");
    }

    #[test]
    fn shuffled_labels_do_not_generalise() {
        let (x, _) = separable(400, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let y: Vec<u8> = (0..400).map(|_| rng.random_bool(0.5) as u8).collect();
        let spec = NetSpec::new(Architecture::Ffnn1 { hidden: 16 }, 1, 4).unwrap();
        let opt = OptimizerConfig { learning_rate: 0.1, decay: 0.0, batch_size: 16, epochs: 30, ..Default::default() };
        let net = train(&spec, x.slice(ndarray::s![..300, ..]), &y[..300], &opt, 4).unwrap();
        assert!(net.epoch_loss.last().unwrap() < net.epoch_loss.first().unwrap());
        let a = auroc(&net.predict(x.slice(ndarray::s![300.., ..])).unwrap(), &y[300..]).unwrap();
        assert!((a - 0.5).abs() < 0.1, "validation AUROC {a}");
    }

    #[test]
    fn full_batch_loss_is_monotone() {
        let (x, y) = separable(40, 5);
        for arch in [
            Architecture::Ffnn1 { hidden: 6 },
            Architecture::Ffnn2 { hidden: 4, per_feature: 2 },
            Architecture::Recurrent { hidden: 4, cell: Cell::Simple },
            Architecture::Recurrent { hidden: 4, cell: Cell::Gated },
        ] {
            let depth = if matches!(arch, Architecture::Ffnn1 { .. }) { 1 } else { 2 };
            let spec = NetSpec::new(arch, depth, 4 / depth).unwrap();
            let opt =
                OptimizerConfig { learning_rate: 1e-3, decay: 0.0, batch_size: 40, epochs: 50, ..Default::default() };
            let net = train(&spec, x.view(), &y, &opt, 6).unwrap();
            for w in net.epoch_loss.windows(2) {
                assert!(w[1] <= w[0] + 1e-9, "{arch:?}: {} -> {}", w[0], w[1]);
            }
        }
    }

    #[test]
    fn same_seed_same_parameters() {
        let (x, y) = separable(50, 7);
        let spec = NetSpec::new(Architecture::Recurrent { hidden: 3, cell: Cell::Gated }, 2, 2).unwrap();
        let opt = OptimizerConfig { epochs: 3, ..Default::default() };
        let a = train(&spec, x.view(), &y, &opt, 11).unwrap();
        let b = train(&spec, x.view(), &y, &opt, 11).unwrap();
        assert_eq!(a, b);
        let mut csv = Vec::new();
        a.write_loss_csv(&mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 4);
    }

    #[test]
    fn divergence_is_reported() {
        let (mut x, y) = separable(30, 9);
        x[[3, 1]] = f64::NAN;
        let spec = NetSpec::new(Architecture::Ffnn1 { hidden: 4 }, 1, 4).unwrap();
        let opt = OptimizerConfig { epochs: 5, ..Default::default() };
        assert!(matches!(train(&spec, x.view(), &y, &opt, 0), Err(Error::Divergence { epoch: 0, .. })));
    }
}
