use ndarray::Array2;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// An ordered list of weight and bias tensors. Biases are `1 x k` rows so
/// they broadcast over a batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub tensors: Vec<Array2<f64>>,
}

impl Params {
    pub fn zeros(shapes: &[(usize, usize)]) -> Self {
        Self { tensors: shapes.iter().map(|&s| Array2::zeros(s)).collect() }
    }

    /// Entries uniform in `±1/sqrt(fan_in)`, with `fan_in` taken per tensor.
    pub fn uniform<R: Rng + ?Sized>(shapes: &[(usize, usize)], fan_in: &[usize], rng: &mut R) -> Self {
        let tensors = shapes
            .iter()
            .zip(fan_in)
            .map(|(&s, &f)| {
                let a = 1.0 / (f.max(1) as f64).sqrt();
                Array2::from_shape_simple_fn(s, || rng.random_range(-a..=a))
            })
            .collect();
        Self { tensors }
    }

    pub fn zeros_like(&self) -> Self {
        Self { tensors: self.tensors.iter().map(|t| Array2::zeros(t.raw_dim())).collect() }
    }

    pub fn shapes(&self) -> Vec<(usize, usize)> {
        self.tensors.iter().map(|t| t.dim()).collect()
    }

    /// Total number of scalars.
    pub fn len(&self) -> usize {
        self.tensors.iter().map(|t| t.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn locate(&self, mut i: usize) -> (usize, usize, usize) {
        for (k, t) in self.tensors.iter().enumerate() {
            if i < t.len() {
                return (k, i / t.ncols(), i % t.ncols());
            }
            i -= t.len();
        }
        panic!("parameter index out of range");
    }

    /// Scalar `i` in tensor order, row-major within each tensor.
    pub fn get(&self, i: usize) -> f64 {
        let (k, r, c) = self.locate(i);
        self.tensors[k][[r, c]]
    }

    pub fn set(&mut self, i: usize, v: f64) {
        let (k, r, c) = self.locate(i);
        self.tensors[k][[r, c]] = v;
    }

    /// `self += a * other`.
    pub fn add_scaled(&mut self, a: f64, other: &Params) {
        for (t, o) in self.tensors.iter_mut().zip(&other.tensors) {
            t.scaled_add(a, o);
        }
    }

    pub fn scale(&mut self, a: f64) {
        for t in &mut self.tensors {
            t.mapv_inplace(|v| v * a);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.tensors.iter().all(|t| t.iter().all(|v| v.is_finite()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_indexing() {
        let mut p = Params::zeros(&[(2, 3), (1, 2)]);
        assert_eq!(p.len(), 8);
        p.set(4, 7.0);
        p.set(6, 1.5);
        assert_eq!(p.tensors[0][[1, 1]], 7.0);
        assert_eq!(p.tensors[1][[0, 0]], 1.5);
        assert_eq!(p.get(4), 7.0);
    }
}
