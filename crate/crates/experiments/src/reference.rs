//! Published results obtained on the full news corpus. They cannot be
//! reproduced on synthetic or small data, so commands print them next to
//! their own output for comparison and never assert against them.

use serde::Serialize;

pub const STATES: [&str; 5] = ["NY", "CA", "TX", "FL", "WA"];

/// (row, per-state (mean, std) in [`STATES`] order).
pub const BASELINE: [(&str, [(f64, f64); 5]); 12] = [
    ("random@fixed:1", [(0.500, 0.000); 5]),
    ("rf@fixed:1", [(0.604, 0.118), (0.504, 0.065), (0.721, 0.184), (0.591, 0.140), (0.500, 0.248)]),
    ("rf@fixed:14", [(0.631, 0.093), (0.390, 0.133), (0.530, 0.166), (0.623, 0.120), (0.591, 0.261)]),
    ("rf@ks:14", [(0.685, 0.057), (0.466, 0.060), (0.682, 0.196), (0.685, 0.101), (0.667, 0.214)]),
    ("adaboost@fixed:1", [(0.623, 0.079), (0.436, 0.110), (0.574, 0.117), (0.459, 0.093), (0.376, 0.122)]),
    ("adaboost@fixed:14", [(0.500, 0.243), (0.360, 0.189), (0.401, 0.136), (0.421, 0.126), (0.538, 0.253)]),
    ("adaboost@ks:14", [(0.668, 0.073), (0.463, 0.135), (0.589, 0.136), (0.472, 0.123), (0.544, 0.171)]),
    ("ffnn1@stacked:1", [(0.393, 0.065), (0.584, 0.100), (0.454, 0.199), (0.420, 0.099), (0.409, 0.149)]),
    ("ffnn1@stacked:7", [(0.414, 0.110), (0.672, 0.095), (0.650, 0.118), (0.667, 0.098), (0.615, 0.252)]),
    ("ffnn2@stacked:7", [(0.428, 0.095), (0.680, 0.073), (0.528, 0.127), (0.362, 0.144), (0.648, 0.201)]),
    ("ffnn1@ks:7", [(0.479, 0.219), (0.568, 0.077), (0.591, 0.175), (0.552, 0.039), (0.546, 0.229)]),
    ("lstm@stacked:7", [(0.374, 0.078), (0.582, 0.153), (0.725, 0.212), (0.696, 0.168), (0.563, 0.270)]),
];

/// Group-mode result for one state with few attacks.
#[derive(Debug, Clone, Copy)]
pub struct GroupRef {
    pub state: &'static str,
    /// Similar states pooled with it.
    pub similar: &'static [&'static str],
    /// Forest mean and std of AUROC.
    pub forest: (f64, f64),
    /// Single-layer feed-forward mean and std of AUROC.
    pub ffnn: (f64, f64),
}

const fn g(state: &'static str, similar: &'static [&'static str], forest: (f64, f64), ffnn: (f64, f64)) -> GroupRef {
    GroupRef { state, similar, forest, ffnn }
}

pub const GROUPS: [GroupRef; 8] = [
    g("LA", &["MO"], (0.417, 0.149), (0.605, 0.076)),
    g("MO", &["KS", "LA"], (0.466, 0.175), (0.601, 0.097)),
    g("NV", &["UT", "KY", "MN"], (0.459, 0.084), (0.527, 0.031)),
    g("PA", &["OH", "IL", "VA"], (0.500, 0.164), (0.491, 0.164)),
    g("IN", &["OH", "TN"], (0.520, 0.110), (0.575, 0.090)),
    g("NC", &["VA", "MD", "NJ"], (0.548, 0.280), (0.654, 0.214)),
    g("TN", &["KY", "IN"], (0.461, 0.108), (0.419, 0.113)),
    g("VA", &["NC", "MD", "NJ"], (0.548, 0.280), (0.417, 0.151)),
];

/// Change in forest AUROC on NY when CA rows supplement training.
pub const TRANSFER_NY_PLUS_CA: f64 = -0.232;
/// Forest r_s between training positives and fold AUROC, with and without CA.
pub const TRAIN_CORR_RS: (f64, f64) = (-0.241, 0.136);
/// Kruskal-Wallis p-values on every attack characteristic exceeded this.
pub const CHARACTERISTICS_P_ABOVE: f64 = 0.1;
/// Coarse always-predict-five-states model: AUROC, AUPRC.
pub const COARSE: (f64, f64) = (0.733, 0.468);
/// Baselines quoted for that model: AUROC, AUPRC.
pub const COARSE_BASELINES: (f64, f64) = (0.500, 0.003);

pub fn baseline(row: &str, state: &str) -> Option<(f64, f64)> {
    let col = STATES.iter().position(|s| *s == state)?;
    BASELINE.iter().find(|(r, _)| *r == row).map(|(_, cells)| cells[col])
}

pub fn group(state: &str) -> Option<&'static GroupRef> {
    GROUPS.iter().find(|g| g.state == state)
}

#[derive(Debug, Serialize)]
pub struct Cell {
    pub mean: f64,
    pub std: f64,
}

impl From<(f64, f64)> for Cell {
    fn from((mean, std): (f64, f64)) -> Self {
        Cell { mean, std }
    }
}
