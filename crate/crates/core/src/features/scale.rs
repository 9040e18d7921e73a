use ndarray::{Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-column min-max scaling fitted on training rows. Test rows may fall
/// outside `[0, 1]`; they are not clamped. A constant training column maps
/// everything to 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMaxScaler {
    pub min: Vec<f64>,
    pub range: Vec<f64>,
}

impl MinMaxScaler {
    pub fn fit(x: ArrayView2<f64>) -> Result<Self> {
        if x.nrows() == 0 {
            return Err(Error::EmptySample);
        }
        let mut min = Vec::with_capacity(x.ncols());
        let mut range = Vec::with_capacity(x.ncols());
        for col in x.axis_iter(Axis(1)) {
            let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            min.push(lo);
            range.push(hi - lo);
        }
        Ok(Self { min, range })
    }

    pub fn transform(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.min.len() {
            return Err(Error::Shape { expected: self.min.len(), got: x.ncols() });
        }
        let mut out = x.to_owned();
        for (j, mut col) in out.axis_iter_mut(Axis(1)).enumerate() {
            let (lo, r) = (self.min[j], self.range[j]);
            if r > 0.0 {
                col.mapv_inplace(|v| (v - lo) / r);
            } else {
                col.fill(0.0);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;

    #[test]
    fn constant_column_and_out_of_range() {
        let train = array![[1.0, 5.0], [3.0, 5.0]];
        let s = MinMaxScaler::fit(train.view()).unwrap();
        let t = s.transform(array![[4.0, 7.0], [0.0, 5.0]].view()).unwrap();
        assert_eq!(t, array![[1.5, 0.0], [-0.5, 0.0]]);
    }

    proptest! {
        #[test]
        fn training_rows_land_in_unit_interval(v in prop::collection::vec(-1e6f64..1e6, 3..60)) {
            let x = Array2::from_shape_vec((v.len() / 3, 3), v[..v.len() / 3 * 3].to_vec()).unwrap();
            let t = MinMaxScaler::fit(x.view()).unwrap().transform(x.view()).unwrap();
            prop_assert!(t.iter().all(|&v| (0.0..=1.0).contains(&v)));
        }
    }
}
