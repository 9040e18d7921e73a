use ndarray::{Array2, ArrayView2};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoteConfig {
    pub k: usize,
    /// Minority size after oversampling as a fraction of the majority size.
    pub ratio: f64,
}

impl Default for SmoteConfig {
    fn default() -> Self {
        Self { k: 5, ratio: 1.0 }
    }
}

/// `(base, neighbour)` row pairs, one per synthetic row.
pub type Parents = Vec<(usize, usize)>;

/// Training set with synthetic minority rows appended after the originals.
#[derive(Debug, Clone, PartialEq)]
pub struct Oversampled {
    pub x: Array2<f64>,
    pub y: Vec<u8>,
    /// `(base, neighbour)` input-row indices for each appended row.
    pub parents: Parents,
}

/// Indices of the `k` nearest other rows of `x` to row `i`, nearest first;
/// distance ties go to the lower index.
fn nearest(x: ArrayView2<f64>, i: usize, k: usize) -> Vec<usize> {
    let base = x.row(i);
    let mut d: Vec<(f64, usize)> = (0..x.nrows())
        .filter(|&j| j != i)
        .map(|j| (x.row(j).iter().zip(base.iter()).map(|(a, b)| (a - b) * (a - b)).sum(), j))
        .collect();
    d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    d.truncate(k);
    d.into_iter().map(|(_, j)| j).collect()
}

/// `count` synthetic rows interpolated between minority rows and one of their
/// `k` nearest minority neighbours. Base rows are taken round-robin. Parent
/// pairs index into `x_min`.
pub fn smote<R: Rng + ?Sized>(
    x_min: ArrayView2<f64>,
    count: usize,
    k: usize,
    rng: &mut R,
) -> Result<(Array2<f64>, Parents)> {
    let n = x_min.nrows();
    if n < 2 {
        return Err(Error::invalid(format!("SMOTE needs at least 2 minority rows, got {n}")));
    }
    if k == 0 {
        return Err(Error::invalid("SMOTE needs k >= 1"));
    }
    let k = k.min(n - 1);
    let neighbours: Vec<Vec<usize>> = (0..n).map(|i| nearest(x_min, i, k)).collect();
    let mut out = Array2::zeros((count, x_min.ncols()));
    let mut parents = Vec::with_capacity(count);
    for s in 0..count {
        let base = s % n;
        let nb = neighbours[base][rng.random_range(0..k)];
        let u: f64 = rng.random();
        let (a, b) = (x_min.row(base), x_min.row(nb));
        for (j, v) in out.row_mut(s).iter_mut().enumerate() {
            // clamp guards a one-ulp overshoot past the far endpoint
            *v = (a[j] + u * (b[j] - a[j])).clamp(a[j].min(b[j]), a[j].max(b[j]));
        }
        parents.push((base, nb));
    }
    Ok((out, parents))
}

/// Oversamples the smaller class until it reaches `ratio` times the larger.
pub fn oversample<R: Rng + ?Sized>(
    x: ArrayView2<f64>,
    y: &[u8],
    config: &SmoteConfig,
    rng: &mut R,
) -> Result<Oversampled> {
    if y.len() != x.nrows() {
        return Err(Error::Shape { expected: x.nrows(), got: y.len() });
    }
    let n1 = y.iter().filter(|&&v| v == 1).count();
    let n0 = y.len() - n1;
    let minority: u8 = if n1 <= n0 { 1 } else { 0 };
    let rows: Vec<usize> = (0..y.len()).filter(|&i| y[i] == minority).collect();
    let target = (config.ratio * n0.max(n1) as f64).round() as usize;
    let count = target.saturating_sub(rows.len());
    let mut xs = x.to_owned();
    let mut ys = y.to_vec();
    let mut parents = Vec::new();
    if count > 0 {
        let x_min = x.select(ndarray::Axis(0), &rows);
        let (synthetic, local) = smote(x_min.view(), count, config.k, rng)?;
        for row in synthetic.rows() {
            xs.push_row(row).expect("same width");
        }
        ys.extend(std::iter::repeat_n(minority, count));
        parents = local.into_iter().map(|(a, b)| (rows[a], rows[b])).collect();
    }
    Ok(Oversampled { x: xs, y: ys, parents })
}
