//! Network definitions with batched forward and backward passes.
//!
//! Every architecture reads one instance as a flat row of `depth * features`
//! values laid out day-major, oldest day first, and ends in a single sigmoid
//! unit on top of a hidden representation.

use ndarray::{s, Array1, Array2, ArrayView2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::params::Params;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cell {
    /// Input, forget, cell and output gates.
    Gated,
    /// `h_t = tanh(W [x_t, h_{t-1}] + b)`.
    Simple,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Architecture {
    /// One ReLU layer over the whole stacked window.
    Ffnn1 {
        hidden: usize,
    },
    /// A ReLU subnetwork per feature over its own history, then a ReLU layer
    /// over the concatenated subnetwork outputs.
    Ffnn2 {
        hidden: usize,
        per_feature: usize,
    },
    Recurrent {
        hidden: usize,
        cell: Cell,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetSpec {
    pub arch: Architecture,
    /// Days per instance.
    pub depth: usize,
    /// Features per day.
    pub features: usize,
}

pub(crate) enum Cache {
    Ffnn1 { a0: Array2<f64>, h: Array2<f64> },
    Ffnn2 { xs: Vec<Array2<f64>>, a: Vec<Array2<f64>>, g: Array2<f64>, a0: Array2<f64>, h: Array2<f64> },
    Simple { hs: Vec<Array2<f64>> },
    Gated { hs: Vec<Array2<f64>>, cs: Vec<Array2<f64>>, gates: Vec<[Array2<f64>; 4]> },
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn relu(a: &Array2<f64>) -> Array2<f64> {
    a.mapv(|v| v.max(0.0))
}

fn relu_back(d: &Array2<f64>, a: &Array2<f64>) -> Array2<f64> {
    let mut out = d.clone();
    out.zip_mut_with(a, |g, &v| {
        if v <= 0.0 {
            *g = 0.0
        }
    });
    out
}

/// `x W^T + b` for a batch `x`.
fn affine(x: &ArrayView2<f64>, w: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
    x.dot(&w.t()) + b
}

fn row_sum(d: &Array2<f64>) -> Array2<f64> {
    d.sum_axis(Axis(0)).insert_axis(Axis(0))
}

impl NetSpec {
    pub fn new(arch: Architecture, depth: usize, features: usize) -> Result<Self> {
        let widths_ok = match arch {
            Architecture::Ffnn1 { hidden } | Architecture::Recurrent { hidden, .. } => hidden >= 1,
            Architecture::Ffnn2 { hidden, per_feature } => hidden >= 1 && per_feature >= 1,
        };
        if !widths_ok || depth == 0 || features == 0 {
            return Err(Error::invalid(format!("invalid network shape {arch:?}, depth {depth}, features {features}")));
        }
        Ok(Self { arch, depth, features })
    }

    pub fn input_len(&self) -> usize {
        self.depth * self.features
    }

    /// Tensor shapes in parameter order.
    pub fn shapes(&self) -> Vec<(usize, usize)> {
        let (d, m) = (self.depth, self.features);
        match self.arch {
            Architecture::Ffnn1 { hidden: k } => vec![(k, d * m), (1, k), (1, k), (1, 1)],
            Architecture::Ffnn2 { hidden: k, per_feature: q } => {
                let mut v: Vec<(usize, usize)> = (0..m).flat_map(|_| [(q, d), (1, q)]).collect();
                v.extend([(k, m * q), (1, k), (1, k), (1, 1)]);
                v
            }
            Architecture::Recurrent { hidden: h, cell } => {
                let g = if cell == Cell::Gated { 4 * h } else { h };
                vec![(g, m), (g, h), (1, g), (1, h), (1, 1)]
            }
        }
    }

    fn fan_in(&self) -> Vec<usize> {
        let (d, m) = (self.depth, self.features);
        match self.arch {
            Architecture::Ffnn1 { hidden: k } => vec![d * m, d * m, k, k],
            Architecture::Ffnn2 { hidden: k, per_feature: q } => {
                let mut v: Vec<usize> = (0..m).flat_map(|_| [d, d]).collect();
                v.extend([m * q, m * q, k, k]);
                v
            }
            Architecture::Recurrent { hidden: h, .. } => vec![m + h, m + h, m + h, h, h],
        }
    }

    /// Seeded uniform fan-in initialisation.
    pub fn init<R: Rng + ?Sized>(&self, rng: &mut R) -> Params {
        Params::uniform(&self.shapes(), &self.fan_in(), rng)
    }

    pub fn check(&self, params: &Params) -> Result<()> {
        let want = self.shapes();
        if params.tensors.len() != want.len() {
            return Err(Error::Shape { expected: want.len(), got: params.tensors.len() });
        }
        for (t, w) in params.tensors.iter().zip(&want) {
            if t.dim() != *w {
                return Err(Error::invalid(format!("parameter shape {:?}, expected {w:?}", t.dim())));
            }
        }
        Ok(())
    }

    /// Class-1 probability for each row of `x`.
    pub fn forward(&self, params: &Params, x: ArrayView2<f64>) -> Result<Vec<f64>> {
        self.check(params)?;
        self.check_input(x)?;
        Ok(self.logits(params, x).0.iter().map(|&z| sigmoid(z)).collect())
    }

    pub(crate) fn check_input(&self, x: ArrayView2<f64>) -> Result<()> {
        if x.ncols() != self.input_len() {
            return Err(Error::Shape { expected: self.input_len(), got: x.ncols() });
        }
        Ok(())
    }

    /// Pre-sigmoid outputs plus what the backward pass needs. Shapes must
    /// already be checked.
    pub(crate) fn logits(&self, params: &Params, x: ArrayView2<f64>) -> (Array1<f64>, Cache) {
        let p = &params.tensors;
        let n = p.len();
        let (hidden, cache) = match self.arch {
            Architecture::Ffnn1 { .. } => {
                let a0 = affine(&x, &p[0], &p[1]);
                let h = relu(&a0);
                (h.clone(), Cache::Ffnn1 { a0, h })
            }
            Architecture::Ffnn2 { per_feature: q, .. } => {
                let m = self.features;
                let mut xs = Vec::with_capacity(m);
                let mut a = Vec::with_capacity(m);
                let mut g = Array2::zeros((x.nrows(), m * q));
                for j in 0..m {
                    let cols: Vec<usize> = (0..self.depth).map(|t| t * m + j).collect();
                    let xj = x.select(Axis(1), &cols);
                    let aj = affine(&xj.view(), &p[2 * j], &p[2 * j + 1]);
                    g.slice_mut(s![.., j * q..(j + 1) * q]).assign(&relu(&aj));
                    xs.push(xj);
                    a.push(aj);
                }
                let a0 = affine(&g.view(), &p[2 * m], &p[2 * m + 1]);
                let h = relu(&a0);
                (h.clone(), Cache::Ffnn2 { xs, a, g, a0, h })
            }
            Architecture::Recurrent { hidden: hd, cell } => {
                let b = x.nrows();
                let mut hs = vec![Array2::zeros((b, hd))];
                match cell {
                    Cell::Simple => {
                        for t in 0..self.depth {
                            let xt = x.slice(s![.., t * self.features..(t + 1) * self.features]);
                            let a = affine(&xt, &p[0], &p[2]) + hs[t].dot(&p[1].t());
                            hs.push(a.mapv(f64::tanh));
                        }
                        (hs[self.depth].clone(), Cache::Simple { hs })
                    }
                    Cell::Gated => {
                        let (h_last, cs, gates) = gated_forward(self, p, x, &mut hs, Array2::zeros((b, hd)));
                        (h_last, Cache::Gated { hs, cs, gates })
                    }
                }
            }
        };
        let z = hidden.dot(&p[n - 2].t()).column(0).to_owned() + p[n - 1][[0, 0]];
        (z, cache)
    }

    /// Gradients of `Σ dz_i * z_i` with respect to every parameter.
    pub(crate) fn backward(&self, params: &Params, x: ArrayView2<f64>, cache: &Cache, dz: &Array1<f64>) -> Params {
        let p = &params.tensors;
        let n = p.len();
        let mut g = params.zeros_like();
        let dz2 = dz.view().insert_axis(Axis(1)).to_owned();
        let hidden = match cache {
            Cache::Ffnn1 { h, .. } | Cache::Ffnn2 { h, .. } => h,
            Cache::Simple { hs } | Cache::Gated { hs, .. } => hs.last().expect("at least h0"),
        };
        g.tensors[n - 2] = dz2.t().dot(hidden);
        g.tensors[n - 1][[0, 0]] = dz.sum();
        let dh = dz2.dot(&p[n - 2]);
        match cache {
            Cache::Ffnn1 { a0, .. } => {
                let da0 = relu_back(&dh, a0);
                g.tensors[0] = da0.t().dot(&x);
                g.tensors[1] = row_sum(&da0);
            }
            Cache::Ffnn2 { xs, a, g: gcat, a0, .. } => {
                let m = self.features;
                let q = p[1].ncols();
                let da0 = relu_back(&dh, a0);
                g.tensors[2 * m] = da0.t().dot(gcat);
                g.tensors[2 * m + 1] = row_sum(&da0);
                let dg = da0.dot(&p[2 * m]);
                for j in 0..m {
                    let daj = relu_back(&dg.slice(s![.., j * q..(j + 1) * q]).to_owned(), &a[j]);
                    g.tensors[2 * j] = daj.t().dot(&xs[j]);
                    g.tensors[2 * j + 1] = row_sum(&daj);
                }
            }
            Cache::Simple { hs } => {
                let mut dh = dh;
                for t in (0..self.depth).rev() {
                    let xt = x.slice(s![.., t * self.features..(t + 1) * self.features]);
                    let mut da = dh;
                    da.zip_mut_with(&hs[t + 1], |d, &h| *d *= 1.0 - h * h);
                    g.tensors[0] += &da.t().dot(&xt);
                    g.tensors[1] += &da.t().dot(&hs[t]);
                    g.tensors[2] += &row_sum(&da);
                    dh = da.dot(&p[1]);
                }
            }
            Cache::Gated { hs, cs, gates } => gated_backward(self, p, x, hs, cs, gates, dh, &mut g),
        }
        g
    }
}

/// Final hidden state, every cell state and every step's gate activations.
type GatedTrace = (Array2<f64>, Vec<Array2<f64>>, Vec<[Array2<f64>; 4]>);

/// Runs the gated cell from `(hs[0], c0)`, pushing each new hidden state to
/// `hs`. Gate blocks are ordered input, forget, cell, output.
fn gated_forward(
    spec: &NetSpec,
    p: &[Array2<f64>],
    x: ArrayView2<f64>,
    hs: &mut Vec<Array2<f64>>,
    c0: Array2<f64>,
) -> GatedTrace {
    let hd = p[1].ncols();
    let m = spec.features;
    let mut cs = vec![c0];
    let mut gates = Vec::with_capacity(spec.depth);
    for t in 0..spec.depth {
        let xt = x.slice(s![.., t * m..(t + 1) * m]);
        let z = affine(&xt, &p[0], &p[2]) + hs[t].dot(&p[1].t());
        let i = z.slice(s![.., 0..hd]).mapv(sigmoid);
        let f = z.slice(s![.., hd..2 * hd]).mapv(sigmoid);
        let gg = z.slice(s![.., 2 * hd..3 * hd]).mapv(f64::tanh);
        let o = z.slice(s![.., 3 * hd..4 * hd]).mapv(sigmoid);
        let c = &f * &cs[t] + &i * &gg;
        hs.push(&o * &c.mapv(f64::tanh));
        cs.push(c);
        gates.push([i, f, gg, o]);
    }
    (hs[spec.depth].clone(), cs, gates)
}

#[allow(clippy::too_many_arguments)]
fn gated_backward(
    spec: &NetSpec,
    p: &[Array2<f64>],
    x: ArrayView2<f64>,
    hs: &[Array2<f64>],
    cs: &[Array2<f64>],
    gates: &[[Array2<f64>; 4]],
    mut dh: Array2<f64>,
    g: &mut Params,
) {
    let hd = p[1].ncols();
    let m = spec.features;
    let mut dc: Array2<f64> = Array2::zeros(dh.raw_dim());
    for t in (0..spec.depth).rev() {
        let [i, f, gg, o] = &gates[t];
        let tc = cs[t + 1].mapv(f64::tanh);
        let d_o = &dh * &tc;
        dc = dc + &dh * o * &tc.mapv(|v| 1.0 - v * v);
        let d_f = &dc * &cs[t];
        let d_i = &dc * gg;
        let d_g = &dc * i;
        let mut dz = Array2::zeros((dh.nrows(), 4 * hd));
        dz.slice_mut(s![.., 0..hd]).assign(&(&d_i * &i.mapv(|v| v * (1.0 - v))));
        dz.slice_mut(s![.., hd..2 * hd]).assign(&(&d_f * &f.mapv(|v| v * (1.0 - v))));
        dz.slice_mut(s![.., 2 * hd..3 * hd]).assign(&(&d_g * &gg.mapv(|v| 1.0 - v * v)));
        dz.slice_mut(s![.., 3 * hd..4 * hd]).assign(&(&d_o * &o.mapv(|v| v * (1.0 - v))));
        let xt = x.slice(s![.., t * m..(t + 1) * m]);
        g.tensors[0] += &dz.t().dot(&xt);
        g.tensors[1] += &dz.t().dot(&hs[t]);
        g.tensors[2] += &row_sum(&dz);
        dc = &dc * f;
        dh = dz.dot(&p[1]);
    }
}
