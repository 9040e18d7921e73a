use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use chrono::{Days, NaiveDate};
use ndarray::{Array2, Axis};
use serde::{Deserialize, Serialize};

use super::registry::{FeatureGroup, FeatureId};
use crate::error::{Error, Result};

/// One state's record: an `n x m` feature matrix over a gap-free ascending
/// date index, the binary label vector, and the column identities.
///
/// Rows are normally single days. Date-aggregated datasets use one row per
/// block of days, dated by the block's first day, so the index then advances
/// by a constant step larger than one day.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocationDataset {
    pub state: String,
    pub dates: Vec<NaiveDate>,
    pub x: Array2<f64>,
    pub y: Vec<u8>,
    pub feature_ids: Vec<FeatureId>,
}

/// Every day from `start` through `end`, inclusive.
pub fn date_range(start: NaiveDate, end: NaiveDate) -> Vec<NaiveDate> {
    start.iter_days().take_while(|d| *d <= end).collect()
}

impl LocationDataset {
    pub fn new(
        state: impl Into<String>,
        dates: Vec<NaiveDate>,
        x: Array2<f64>,
        y: Vec<u8>,
        feature_ids: Vec<FeatureId>,
    ) -> Result<Self> {
        let ds = LocationDataset { state: state.into(), dates, x, y, feature_ids };
        ds.validate()?;
        Ok(ds)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dates.len();
        if self.x.nrows() != n {
            return Err(Error::Shape { expected: n, got: self.x.nrows() });
        }
        if self.y.len() != n {
            return Err(Error::Shape { expected: n, got: self.y.len() });
        }
        if self.x.ncols() != self.feature_ids.len() {
            return Err(Error::Shape { expected: self.feature_ids.len(), got: self.x.ncols() });
        }
        let step = self.step_days();
        for pair in self.dates.windows(2) {
            if pair[0].checked_add_days(Days::new(step)) != Some(pair[1]) {
                return Err(Error::invalid(format!(
                    "{}: date index is not gap-free ascending at {} -> {}",
                    self.state, pair[0], pair[1]
                )));
            }
        }
        if let Some(bad) = self.y.iter().find(|&&v| v > 1) {
            return Err(Error::invalid(format!("{}: label {bad} is not binary", self.state)));
        }
        if self.x.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("{}: non-finite feature value", self.state)));
        }
        Ok(())
    }

    /// Spacing of the date index in days (1 unless date-aggregated).
    pub fn step_days(&self) -> u64 {
        match self.dates.as_slice() {
            [a, b, ..] if b > a => (*b - *a).num_days() as u64,
            _ => 1,
        }
    }

    pub fn n_days(&self) -> usize {
        self.dates.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_ids.len()
    }

    pub fn positives(&self) -> usize {
        self.y.iter().map(|&v| v as usize).sum()
    }

    pub fn imbalance(&self) -> f64 {
        if self.y.is_empty() {
            0.0
        } else {
            self.positives() as f64 / self.y.len() as f64
        }
    }

    /// Column indices belonging to `group`.
    pub fn group_columns(&self, group: FeatureGroup) -> Vec<usize> {
        self.feature_ids.iter().enumerate().filter(|(_, id)| id.group == group).map(|(j, _)| j).collect()
    }

    /// A copy restricted to the columns whose group is not in `dropped`.
    pub fn without_groups(&self, dropped: &[FeatureGroup]) -> LocationDataset {
        let keep: Vec<usize> = self
            .feature_ids
            .iter()
            .enumerate()
            .filter(|(_, id)| !dropped.contains(&id.group))
            .map(|(j, _)| j)
            .collect();
        LocationDataset {
            state: self.state.clone(),
            dates: self.dates.clone(),
            x: self.x.select(Axis(1), &keep),
            y: self.y.clone(),
            feature_ids: keep.iter().map(|&j| self.feature_ids[j].clone()).collect(),
        }
    }

    /// Per-feature mean over all days.
    pub fn mean_features(&self) -> Vec<f64> {
        self.x.mean_axis(Axis(0)).map(|m| m.to_vec()).unwrap_or_else(|| vec![0.0; self.n_features()])
    }

    /// Writes `date,y,<feature ids...>` followed by one row per day. Values
    /// use the shortest representation that parses back to the same bits.
    /// `comment`, when given, is written as a leading `# ...` line.
    pub fn write_csv(&self, path: impl AsRef<Path>, comment: Option<&str>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        self.write_to(&mut w, comment).map_err(|e| Error::io(path, e))?;
        w.flush().map_err(|e| Error::io(path, e))
    }

    fn write_to<W: Write>(&self, w: &mut W, comment: Option<&str>) -> std::io::Result<()> {
        if let Some(c) = comment {
            writeln!(w, "# {c}")?;
        }
        write!(w, "date,y")?;
        for id in &self.feature_ids {
            write!(w, ",{id}")?;
        }
        writeln!(w)?;
        for (i, date) in self.dates.iter().enumerate() {
            write!(w, "{},{}", date.format("%Y-%m-%d"), self.y[i])?;
            for v in self.x.row(i) {
                write!(w, ",{v}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    /// Reads a file produced by [`write_csv`](Self::write_csv). The state code
    /// is taken from `state`.
    pub fn read_csv(path: impl AsRef<Path>, state: impl Into<String>) -> Result<Self> {
        let path = path.as_ref();
        let fail = |reason: String| Error::Format { path: path.to_path_buf(), reason };
        let mut rdr =
            csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path).map_err(|e| match e.into_kind() {
                csv::ErrorKind::Io(io) => Error::io(path, io),
                other => fail(format!("{other:?}")),
            })?;
        let header = rdr.headers()?.clone();
        if header.len() < 2 || &header[0] != "date" || &header[1] != "y" {
            return Err(fail("header must start with `date,y`".into()));
        }
        let feature_ids = header.iter().skip(2).map(str::parse::<FeatureId>).collect::<Result<Vec<_>>>()?;
        let m = feature_ids.len();
        let mut dates = Vec::new();
        let mut y = Vec::new();
        let mut values = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() != m + 2 {
                return Err(fail(format!("row {} has {} fields, expected {}", line + 1, rec.len(), m + 2)));
            }
            dates.push(
                NaiveDate::parse_from_str(&rec[0], "%Y-%m-%d").map_err(|e| fail(format!("row {}: {e}", line + 1)))?,
            );
            y.push(match &rec[1] {
                "0" => 0,
                "1" => 1,
                other => return Err(fail(format!("row {}: label `{other}`", line + 1))),
            });
            for field in rec.iter().skip(2) {
                values.push(field.parse::<f64>().map_err(|e| fail(format!("row {}: `{field}`: {e}", line + 1)))?);
            }
        }
        let x = Array2::from_shape_vec((dates.len(), m), values).map_err(|e| fail(e.to_string()))?;
        LocationDataset::new(state, dates, x, y, feature_ids)
    }
}
