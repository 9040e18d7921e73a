use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    /// sup |F_a - F_b| over the merged support.
    pub statistic: f64,
    /// Asymptotic two-sided significance, in (0, 1].
    pub p_value: f64,
}

/// Two-sample Kolmogorov-Smirnov test.
///
/// The statistic is exact. The p-value uses the asymptotic Kolmogorov
/// distribution at `lambda = sqrt(ne) * D`, `ne = na*nb/(na+nb)`, clamped to
/// `[f64::MIN_POSITIVE, 1]` so it never reaches 0.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample);
    }
    if a.iter().chain(b).any(|v| v.is_nan()) {
        return Err(Error::invalid("NaN in K-S sample"));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_unstable_by(f64::total_cmp);
    b.sort_unstable_by(f64::total_cmp);
    let statistic = ks_statistic_sorted(&a, &b);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let ne = na * nb / (na + nb);
    Ok(KsResult { statistic, p_value: kolmogorov_sf(ne.sqrt() * statistic).clamp(f64::MIN_POSITIVE, 1.0) })
}

/// D for two ascending samples, by a single merge walk. Computed as
/// `max |ia*nb - ib*na| / (na*nb)` on integer counts, so the only rounding is
/// the final division.
pub fn ks_statistic_sorted(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len(), b.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut best: u64 = 0;
    while i < na && j < nb {
        let v = if a[i] <= b[j] { a[i] } else { b[j] };
        while i < na && a[i] == v {
            i += 1;
        }
        while j < nb && b[j] == v {
            j += 1;
        }
        let gap = (i as u64 * nb as u64).abs_diff(j as u64 * na as u64);
        best = best.max(gap);
    }
    best as f64 / (na as u64 * nb as u64) as f64
}

/// Survival function of the Kolmogorov distribution, P(K > lambda).
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // P(K <= x) = sqrt(2 pi)/x * sum exp(-(2k-1)^2 pi^2 / (8 x^2))
        let c = -std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let mut cdf = 0.0;
        for k in 1..=20 {
            let odd = (2 * k - 1) as f64;
            let term = (c * odd * odd).exp();
            cdf += term;
            if term < 1e-17 {
                break;
            }
        }
        (1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * cdf).clamp(0.0, 1.0)
    } else {
        // 2 * sum (-1)^(k-1) exp(-2 k^2 x^2)
        let mut sf = 0.0;
        let mut sign = 1.0;
        for k in 1..=100 {
            let kf = k as f64;
            let term = (-2.0 * kf * kf * lambda * lambda).exp();
            sf += sign * term;
            sign = -sign;
            if term < 1e-17 {
                break;
            }
        }
        (2.0 * sf).clamp(0.0, 1.0)
    }
}
