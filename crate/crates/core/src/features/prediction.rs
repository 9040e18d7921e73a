//! Prediction-window transforms: widen each label to "an event in the next
//! `dp` days", or pool consecutive `dp`-day blocks into one instance.

use chrono::Duration;
use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};
use crate::ingest::LocationDataset;

fn check_dp(dp: usize) -> Result<()> {
    if dp == 0 {
        return Err(Error::invalid("prediction window must be at least 1 day"));
    }
    Ok(())
}

/// `out[i] = max(y[i .. i + dp])`, truncated at the end of the series.
pub fn propagate_labels(y: &[u8], dp: usize) -> Result<Vec<u8>> {
    check_dp(dp)?;
    Ok((0..y.len()).map(|i| y[i..(i + dp).min(y.len())].iter().copied().max().unwrap_or(0)).collect())
}

/// Mean-pools features and ORs labels over consecutive `dp`-day blocks. A
/// trailing partial block is dropped.
pub fn aggregate_dates(x: ArrayView2<f64>, y: &[u8], dp: usize) -> Result<(Array2<f64>, Vec<u8>)> {
    check_dp(dp)?;
    if y.len() != x.nrows() {
        return Err(Error::Shape { expected: x.nrows(), got: y.len() });
    }
    let blocks = x.nrows() / dp;
    let mut out = Array2::zeros((blocks, x.ncols()));
    let mut labels = Vec::with_capacity(blocks);
    for b in 0..blocks {
        let rows = b * dp..(b + 1) * dp;
        let mut sum = out.row_mut(b);
        for r in rows.clone() {
            sum += &x.row(r);
        }
        sum.mapv_inplace(|v| v / dp as f64);
        labels.push(y[rows].iter().copied().max().unwrap_or(0));
    }
    Ok((out, labels))
}

/// Block-aggregated dataset; each instance is dated by its first day.
pub fn aggregate_dataset(ds: &LocationDataset, dp: usize) -> Result<LocationDataset> {
    let (x, y) = aggregate_dates(ds.x.view(), &ds.y, dp)?;
    let dates = (0..y.len()).map(|b| ds.dates[0] + Duration::days((b * dp) as i64)).collect();
    LocationDataset::new(ds.state.clone(), dates, x, y, ds.feature_ids.clone())
}

/// Label-propagated dataset (same days, widened labels).
pub fn propagate_dataset(ds: &LocationDataset, dp: usize) -> Result<LocationDataset> {
    let mut out = ds.clone();
    out.y = propagate_labels(&ds.y, dp)?;
    Ok(out)
}
