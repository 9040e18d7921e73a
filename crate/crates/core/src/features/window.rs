use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};

/// A model input matrix together with the day index of each row.
#[derive(Debug, Clone, PartialEq)]
pub struct Representation {
    pub x: Array2<f64>,
    /// `days[r]` is the row of the source dataset that row `r` predicts.
    pub days: Vec<usize>,
    /// Number of prior days each row summarises (the largest window in
    /// force).
    pub lookback: usize,
    /// Days per instance in the row layout: `Δt` for stacked rows, 1 for
    /// moving averages.
    pub depth: usize,
}

impl Representation {
    pub fn row_of_day(&self, day: usize) -> Option<usize> {
        // days is ascending and contiguous
        let first = *self.days.first()?;
        (day >= first && day - first < self.days.len()).then(|| day - first)
    }
}

fn check_window(window: usize, n: usize) -> Result<()> {
    if window == 0 || window >= n {
        return Err(Error::Window { window, len: n });
    }
    Ok(())
}

/// Unweighted mean of the previous `window` values: output `k` is the mean of
/// `column[k .. k + window]` and belongs to day `k + window`. Days before
/// `window` have no output.
pub fn moving_average(column: &[f64], window: usize) -> Result<Vec<f64>> {
    check_window(window, column.len())?;
    Ok(moving_average_unchecked(column, window))
}

pub(crate) fn moving_average_unchecked(column: &[f64], window: usize) -> Vec<f64> {
    let w = window as f64;
    column.windows(window).take(column.len().saturating_sub(window)).map(|win| win.iter().sum::<f64>() / w).collect()
}

/// Fixed-window moving average of every column; rows for days `window..n`.
pub fn moving_average_matrix(x: ArrayView2<f64>, window: usize) -> Result<Representation> {
    per_feature_moving_average(x, &vec![window; x.ncols()])
}

/// Column `j` averaged over `windows[j]` prior days. Rows start at the day
/// where every column's window is satisfied.
pub fn per_feature_moving_average(x: ArrayView2<f64>, windows: &[usize]) -> Result<Representation> {
    let (n, m) = x.dim();
    if windows.len() != m {
        return Err(Error::Shape { expected: m, got: windows.len() });
    }
    let lookback = windows.iter().copied().max().unwrap_or(1);
    for &w in windows {
        check_window(w, n)?;
    }
    let rows = n - lookback;
    let mut out = Array2::<f64>::zeros((rows, m));
    for (j, &w) in windows.iter().enumerate() {
        let col = x.column(j).to_vec();
        let ma = moving_average_unchecked(&col, w);
        // ma[k] belongs to day k + w; we need days lookback..n
        for r in 0..rows {
            out[[r, j]] = ma[lookback + r - w];
        }
    }
    Ok(Representation { x: out, days: (lookback..n).collect(), lookback, depth: 1 })
}

/// Stacked windows: row for day `i` is `x[i - window .. i]` flattened
/// day-major, oldest day first, so it has `window * m` entries.
pub fn stack(x: ArrayView2<f64>, window: usize) -> Result<Representation> {
    let (n, m) = x.dim();
    check_window(window, n)?;
    let rows = n - window;
    let mut out = Array2::<f64>::zeros((rows, window * m));
    for r in 0..rows {
        let day = r + window;
        let mut row = out.row_mut(r);
        for (k, src) in (day - window..day).enumerate() {
            for j in 0..m {
                row[k * m + j] = x[[src, j]];
            }
        }
    }
    Ok(Representation { x: out, days: (window..n).collect(), lookback: window, depth: window })
}
