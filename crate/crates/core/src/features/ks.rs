//! Variable-length moving average: each feature gets the window length whose
//! moving average best separates event days from non-event days under a
//! two-sample K-S test.

use std::io::{Read, Write};

use ndarray::ArrayView2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::window::{moving_average_unchecked, per_feature_moving_average, Representation};
use crate::error::{Error, Result};
use crate::ingest::FeatureId;
use crate::stats::ks_two_sample;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedWindows {
    /// Selected window per feature, in `1..=max_window`.
    pub windows: Vec<usize>,
    /// Smallest K-S p-value seen for each feature.
    pub p_min: Vec<f64>,
    pub max_window: usize,
}

/// Rows of one matrix that take part in fitting.
#[derive(Debug, Clone, Copy)]
pub struct FitSegment<'a> {
    pub x: ArrayView2<'a, f64>,
    pub y: &'a [u8],
    pub rows: &'a [usize],
}

/// Fits windows using every row of `x`.
pub fn ks_fit(x: ArrayView2<f64>, y: &[u8], max_window: usize) -> Result<FittedWindows> {
    let rows: Vec<usize> = (0..x.nrows()).collect();
    ks_fit_segments(&[FitSegment { x, y, rows: &rows }], max_window)
}

/// Fits windows on the listed rows of one or more matrices with identical
/// columns. Moving averages are taken over each full column; for candidate
/// `t`, only rows `>= t` (those with a complete window) enter the test.
///
/// For each feature the chosen `t` minimises the p-value, ties going to the
/// smaller `t`. If a class is empty for every candidate the feature falls
/// back to `t = 1` with `p = 1`.
pub fn ks_fit_segments(segments: &[FitSegment<'_>], max_window: usize) -> Result<FittedWindows> {
    if max_window == 0 {
        return Err(Error::Window { window: 0, len: 0 });
    }
    let m = segments.first().map(|s| s.x.ncols()).ok_or_else(|| Error::invalid("no fitting data"))?;
    for s in segments {
        if s.x.ncols() != m {
            return Err(Error::Shape { expected: m, got: s.x.ncols() });
        }
        if s.y.len() != s.x.nrows() {
            return Err(Error::Shape { expected: s.x.nrows(), got: s.y.len() });
        }
        if let Some(&r) = s.rows.iter().find(|&&r| r >= s.x.nrows()) {
            return Err(Error::invalid(format!("fitting row {r} out of range")));
        }
        if max_window >= s.x.nrows() {
            return Err(Error::Window { window: max_window, len: s.x.nrows() });
        }
    }
    let has_both = segments.iter().any(|s| s.rows.iter().any(|&r| r >= 1 && s.y[r] == 1))
        && segments.iter().any(|s| s.rows.iter().any(|&r| r >= 1 && s.y[r] == 0));
    if !has_both {
        log::warn!("K-S window fit: a class is empty among training rows; using previous-day values");
    }
    let fitted: Vec<(usize, f64)> = (0..m).into_par_iter().map(|j| fit_feature(segments, j, max_window)).collect();
    Ok(FittedWindows {
        windows: fitted.iter().map(|f| f.0).collect(),
        p_min: fitted.iter().map(|f| f.1).collect(),
        max_window,
    })
}

/// p-value for each candidate window of feature `j`; `None` where a class is
/// empty.
pub fn candidate_p_values(segments: &[FitSegment<'_>], j: usize, max_window: usize) -> Vec<Option<f64>> {
    let columns: Vec<Vec<f64>> = segments.iter().map(|s| s.x.column(j).to_vec()).collect();
    (1..=max_window)
        .map(|t| {
            let mut neg = Vec::new();
            let mut pos = Vec::new();
            for (s, col) in segments.iter().zip(&columns) {
                let ma = moving_average_unchecked(col, t);
                for &r in s.rows.iter().filter(|&&r| r >= t) {
                    if s.y[r] == 1 {
                        pos.push(ma[r - t]);
                    } else {
                        neg.push(ma[r - t]);
                    }
                }
            }
            ks_two_sample(&neg, &pos).ok().map(|r| r.p_value)
        })
        .collect()
}

fn fit_feature(segments: &[FitSegment<'_>], j: usize, max_window: usize) -> (usize, f64) {
    let mut best = (1, 1.0);
    for (k, p) in candidate_p_values(segments, j, max_window).into_iter().enumerate() {
        if let Some(p) = p {
            if p < best.1 {
                best = (k + 1, p);
            }
        }
    }
    best
}

/// Applies fitted windows; never refits.
pub fn ks_transform(x: ArrayView2<f64>, fitted: &FittedWindows) -> Result<Representation> {
    if fitted.windows.len() != x.ncols() {
        return Err(Error::Shape { expected: x.ncols(), got: fitted.windows.len() });
    }
    per_feature_moving_average(x, &fitted.windows)
}

impl FittedWindows {
    pub fn largest(&self) -> usize {
        self.windows.iter().copied().max().unwrap_or(1)
    }

    /// `feature_id,t_j,p_min_j` rows, one per feature.
    pub fn write_csv<W: Write>(&self, writer: W, ids: &[FeatureId]) -> Result<()> {
        if ids.len() != self.windows.len() {
            return Err(Error::Shape { expected: self.windows.len(), got: ids.len() });
        }
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["feature_id", "t_j", "p_min_j"])?;
        for ((id, t), p) in ids.iter().zip(&self.windows).zip(&self.p_min) {
            w.write_record([id.to_string(), t.to_string(), format!("{p:e}")])?;
        }
        w.flush().map_err(|e| Error::io("<fitted windows>", e))
    }

    pub fn read_csv<R: Read>(reader: R, max_window: usize) -> Result<(Self, Vec<FeatureId>)> {
        let mut rdr = csv::Reader::from_reader(reader);
        let mut fitted = FittedWindows { windows: Vec::new(), p_min: Vec::new(), max_window };
        let mut ids = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let bad = |what: &str| Error::invalid(format!("fitted windows: bad {what} `{}`", rec.as_slice()));
            ids.push(rec.get(0).ok_or_else(|| bad("row"))?.parse()?);
            let t: usize = rec.get(1).and_then(|v| v.parse().ok()).ok_or_else(|| bad("t_j"))?;
            let p: f64 = rec.get(2).and_then(|v| v.parse().ok()).ok_or_else(|| bad("p_min_j"))?;
            if t == 0 || t > max_window || !(p > 0.0 && p <= 1.0) {
                return Err(bad("value"));
            }
            fitted.windows.push(t);
            fitted.p_min.push(p);
        }
        Ok((fitted, ids))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{synth_generate, FeatureGroup, Signal, SynthConfig};
    use ndarray::Array2;

    #[test]
    fn single_candidate_is_one() {
        let x = Array2::from_shape_fn((30, 3), |(i, j)| ((i * 7 + j * 3) % 11) as f64);
        let y: Vec<u8> = (0..30).map(|i| (i % 5 == 0) as u8).collect();
        let f = ks_fit(x.view(), &y, 1).unwrap();
        assert_eq!(f.windows, vec![1, 1, 1]);
        assert!(f.p_min.iter().all(|&p| p > 0.0 && p <= 1.0));
    }

    #[test]
    fn empty_class_falls_back() {
        let x = Array2::from_shape_fn((20, 2), |(i, j)| (i + j) as f64);
        let f = ks_fit(x.view(), &[0; 20], 5).unwrap();
        assert_eq!(f.windows, vec![1, 1]);
        assert_eq!(f.p_min, vec![1.0, 1.0]);
    }

    #[test]
    fn transform_with_unit_windows_is_previous_day() {
        let x = Array2::from_shape_fn((6, 2), |(i, j)| (10 * i + j) as f64);
        let f = FittedWindows { windows: vec![1, 1], p_min: vec![1.0, 1.0], max_window: 3 };
        let r = ks_transform(x.view(), &f).unwrap();
        assert_eq!(r.days, (1..6).collect::<Vec<_>>());
        for (row, &day) in r.days.iter().enumerate() {
            assert_eq!(r.x.row(row), x.row(day - 1));
        }
        let bad = FittedWindows { windows: vec![1], p_min: vec![1.0], max_window: 3 };
        assert!(ks_transform(x.view(), &bad).is_err());
    }

    #[test]
    fn transform_drops_rows_for_largest_window() {
        let x = Array2::from_shape_fn((10, 2), |(i, j)| (i * j) as f64);
        let f = FittedWindows { windows: vec![2, 3], p_min: vec![0.5, 0.5], max_window: 3 };
        assert_eq!(ks_transform(x.view(), &f).unwrap().x.nrows(), 7);
    }

    #[test]
    fn recovers_planted_window() {
        let cfg = SynthConfig {
            n_days: 1500,
            m_features: 20,
            imbalance: 0.03,
            signal: Signal::Planted {
                window_len: 7,
                affected_fraction: 1.0,
                shift: 1.0,
                group: Some(FeatureGroup::CameoCount),
            },
            seed: 21,
            ..Default::default()
        };
        let ds = &synth_generate(&cfg).unwrap()[0];
        let f = ks_fit(ds.x.view(), &ds.y, 14).unwrap();
        for j in ds.group_columns(FeatureGroup::CameoCount) {
            assert!((5..=9).contains(&f.windows[j]), "feature {j}: t = {}", f.windows[j]);
            assert!(f.p_min[j] < 1e-6);
        }
    }

    #[test]
    fn csv_roundtrip() {
        let f = FittedWindows { windows: vec![3, 1], p_min: vec![1.5e-9, 1.0], max_window: 14 };
        let ids =
            vec![FeatureId::new(FeatureGroup::ThemeCount, "TERROR"), FeatureId::new(FeatureGroup::CameoCount, "015")];
        let mut buf = Vec::new();
        f.write_csv(&mut buf, &ids).unwrap();
        let (back, back_ids) = FittedWindows::read_csv(buf.as_slice(), 14).unwrap();
        assert_eq!(back, f);
        assert_eq!(back_ids, ids);
    }

    fn ecdf_d(a: &[f64], b: &[f64]) -> f64 {
        let cdf = |s: &[f64], v: f64| s.iter().filter(|&&x| x <= v).count() as f64 / s.len() as f64;
        a.iter().chain(b).map(|&v| (cdf(a, v) - cdf(b, v)).abs()).fold(0.0, f64::max)
    }

    // Direct scan: recompute every moving average by hand and pick the
    // first window reaching the minimum p.
    fn oracle(x: &Array2<f64>, y: &[u8], rows: &[usize], max_window: usize, j: usize) -> (usize, f64) {
        let mut best = (1, 1.0);
        for t in 1..=max_window {
            let (mut pos, mut neg) = (Vec::new(), Vec::new());
            for &r in rows.iter().filter(|&&r| r >= t) {
                let v = (r - t..r).map(|d| x[[d, j]]).sum::<f64>() / t as f64;
                if y[r] == 1 {
                    pos.push(v)
                } else {
                    neg.push(v)
                }
            }
            if pos.is_empty() || neg.is_empty() {
                continue;
            }
            let d = ecdf_d(&neg, &pos);
            let ne = (pos.len() * neg.len()) as f64 / (pos.len() + neg.len()) as f64;
            let p = crate::stats::kolmogorov_sf(ne.sqrt() * d).clamp(f64::MIN_POSITIVE, 1.0);
            if p < best.1 {
                best = (t, p);
            }
        }
        best
    }

    #[test]
    fn matches_direct_scan() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        // Small integer values keep sums exact so both paths agree bit for bit.
        let x = Array2::from_shape_fn((120, 6), |_| rng.random_range(0..8) as f64);
        let y: Vec<u8> = (0..120).map(|_| rng.random_bool(0.15) as u8).collect();
        let rows: Vec<usize> = (0..120).filter(|r| !(40..60).contains(r)).collect();
        let seg = FitSegment { x: x.view(), y: &y, rows: &rows };
        let f = ks_fit_segments(&[seg], 9).unwrap();
        for j in 0..6 {
            let (t, p) = oracle(&x, &y, &rows, 9, j);
            assert_eq!(f.windows[j], t, "feature {j}");
            assert!((f.p_min[j] - p).abs() <= 1e-12 * p.max(1e-300), "feature {j}: {} vs {p}", f.p_min[j]);
        }
    }
}
