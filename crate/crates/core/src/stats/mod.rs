//! Statistical primitives shared across the pipeline.

mod cluster;
mod ks;
mod metrics;
mod rank;

pub use cluster::{euclidean, hier_cluster, Dendrogram, Linkage, Merge};
pub use ks::{kolmogorov_sf, ks_statistic_sorted, ks_two_sample, KsResult};
pub use metrics::{auprc, auroc, ApConvention};
pub use rank::{kruskal_wallis, midranks, pearson, spearman, HTestResult};

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Population standard deviation (divisor `n`).
pub fn std_dev(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let m = mean(values);
    (values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64).sqrt()
}
