//! Model rows: a learner and a representation, written `model@window`
//! (for example `rf@ks:14` or `ffnn2@stacked:7`).

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use statecast::eval::{ModelSpec, WindowSpec};
use statecast::neural::Cell;

use crate::profile::Sizes;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    Random,
    Rf,
    Adaboost,
    Ffnn1,
    Ffnn2,
    Lstm,
    Rnn,
}

impl ModelKind {
    const ALL: [(ModelKind, &'static str); 7] = [
        (ModelKind::Random, "random"),
        (ModelKind::Rf, "rf"),
        (ModelKind::Adaboost, "adaboost"),
        (ModelKind::Ffnn1, "ffnn1"),
        (ModelKind::Ffnn2, "ffnn2"),
        (ModelKind::Lstm, "lstm"),
        (ModelKind::Rnn, "rnn"),
    ];

    pub fn as_str(self) -> &'static str {
        Self::ALL.iter().find(|(k, _)| *k == self).map(|(_, s)| *s).unwrap_or("?")
    }

    pub fn spec(self, sizes: &Sizes) -> ModelSpec {
        let net = |arch| ModelSpec::Net { arch, optimizer: sizes.optimizer };
        match self {
            ModelKind::Random => ModelSpec::Random,
            ModelKind::Rf => ModelSpec::Forest(sizes.forest()),
            ModelKind::Adaboost => ModelSpec::Boost(sizes.boost()),
            ModelKind::Ffnn1 => net(sizes.ffnn(1)),
            ModelKind::Ffnn2 => net(sizes.ffnn(2)),
            ModelKind::Lstm => net(sizes.recurrent(Cell::Gated)),
            ModelKind::Rnn => net(sizes.recurrent(Cell::Simple)),
        }
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL.iter().find(|(_, n)| *n == s).map(|(k, _)| *k).ok_or_else(|| {
            let names: Vec<&str> = Self::ALL.iter().map(|(_, n)| *n).collect();
            format!("unknown model `{s}` (expected one of {})", names.join(", "))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Row {
    pub model: ModelKind,
    pub window: WindowSpec,
}

impl Row {
    pub fn spec(&self, sizes: &Sizes) -> ModelSpec {
        self.model.spec(sizes)
    }

    /// File-name friendly form.
    pub fn slug(&self) -> String {
        self.to_string().replace(['@', ':'], "_")
    }
}

impl fmt::Display for Row {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.model.as_str(), self.window)
    }
}

impl FromStr for Row {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (m, w) = s.split_once('@').ok_or_else(|| format!("row `{s}`: expected model@kind:days"))?;
        let window = w.trim().parse::<WindowSpec>().map_err(|e| e.to_string())?;
        Ok(Row { model: m.trim().parse()?, window })
    }
}

impl Serialize for Row {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A model and a window kind whose length is swept: `rf@ks`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepRow {
    pub model: ModelKind,
    pub kind: WindowKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowKind {
    Fixed,
    Ks,
    Stacked,
}

impl SweepRow {
    pub fn at(&self, days: usize) -> Row {
        let window = match self.kind {
            WindowKind::Fixed => WindowSpec::Fixed(days),
            WindowKind::Ks => WindowSpec::Ks(days),
            WindowKind::Stacked => WindowSpec::Stacked(days),
        };
        Row { model: self.model, window }
    }
}

impl fmt::Display for SweepRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            WindowKind::Fixed => "fixed",
            WindowKind::Ks => "ks",
            WindowKind::Stacked => "stacked",
        };
        write!(f, "{}@{kind}", self.model.as_str())
    }
}

impl FromStr for SweepRow {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (m, w) = s.split_once('@').ok_or_else(|| format!("sweep row `{s}`: expected model@kind"))?;
        let kind = match w.trim() {
            "fixed" => WindowKind::Fixed,
            "ks" => WindowKind::Ks,
            "stacked" => WindowKind::Stacked,
            other => return Err(format!("unknown window kind `{other}`")),
        };
        Ok(SweepRow { model: m.trim().parse()?, kind })
    }
}

impl Serialize for SweepRow {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Random baseline, ensembles at 1, 14 and fitted 14, feed-forward nets at
/// 1 and 7 days (one and two layers) and fitted 7, and the gated recurrent
/// net at 7 days.
pub fn default_grid() -> Vec<Row> {
    [
        "random@fixed:1",
        "rf@fixed:1",
        "rf@fixed:14",
        "rf@ks:14",
        "adaboost@fixed:1",
        "adaboost@fixed:14",
        "adaboost@ks:14",
        "ffnn1@stacked:1",
        "ffnn1@stacked:7",
        "ffnn2@stacked:7",
        "ffnn1@ks:7",
        "lstm@stacked:7",
    ]
    .iter()
    .map(|s| s.parse().expect("valid row"))
    .collect()
}
