use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma_ur;

use crate::error::{Error, Result};

/// 1-based ranks with ties given the average of the positions they span.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start+1 ..= end
        let avg = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = avg;
        }
        start = end;
    }
    ranks
}

/// Sizes of the tie blocks in `values`.
fn tie_sizes(values: &[f64]) -> Vec<usize> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.chunk_by(|a, b| a == b).map(<[f64]>::len).collect()
}

pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Shape { expected: x.len(), got: y.len() });
    }
    if x.len() < 2 {
        return Err(Error::invalid("correlation needs at least two pairs"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Undefined("correlation with zero variance"));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Spearman's rank correlation: Pearson correlation of midranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Shape { expected: x.len(), got: y.len() });
    }
    pearson(&midranks(x), &midranks(y))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HTestResult {
    pub h: f64,
    pub p_value: f64,
    pub groups: usize,
}

/// Kruskal-Wallis H-test with tie correction; p from the chi-square upper
/// tail with `k - 1` degrees of freedom.
pub fn kruskal_wallis(groups: &[Vec<f64>]) -> Result<HTestResult> {
    if groups.len() < 2 {
        return Err(Error::invalid("Kruskal-Wallis needs at least two groups"));
    }
    if groups.iter().any(Vec::is_empty) {
        return Err(Error::EmptySample);
    }
    let pooled: Vec<f64> = groups.iter().flatten().copied().collect();
    let n = pooled.len();
    if n < 3 {
        return Err(Error::invalid("Kruskal-Wallis needs at least three observations"));
    }
    let ranks = midranks(&pooled);
    let nf = n as f64;
    let grand = (nf + 1.0) / 2.0;
    let mut spread = 0.0;
    let mut offset = 0;
    for g in groups {
        let mean_rank = ranks[offset..offset + g.len()].iter().sum::<f64>() / g.len() as f64;
        spread += g.len() as f64 * (mean_rank - grand) * (mean_rank - grand);
        offset += g.len();
    }
    let ties: f64 = tie_sizes(&pooled)
        .into_iter()
        .map(|t| {
            let t = t as f64;
            t * t * t - t
        })
        .sum();
    let correction = 1.0 - ties / (nf * nf * nf - nf);
    if correction <= 0.0 {
        return Err(Error::Undefined("Kruskal-Wallis with all observations tied"));
    }
    let h = (12.0 / (nf * (nf + 1.0)) * spread / correction).max(0.0);
    let dof = (groups.len() - 1) as f64;
    let p_value = if h == 0.0 { 1.0 } else { gamma_ur(dof / 2.0, h / 2.0) };
    Ok(HTestResult { h, p_value, groups: groups.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn midranks_average_ties() {
        assert_eq!(midranks(&[10.0, 20.0, 10.0, 30.0]), vec![1.5, 3.0, 1.5, 4.0]);
    }

    #[test]
    fn spearman_examples() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert!((spearman(&x, &[1.0, 4.0, 9.0, 16.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((spearman(&x, &[4.0, 3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-15);
        // 1 - 6*sum(d^2)/(n(n^2-1)) with d = [-1, 1, -1, 1]
        let oracle = 1.0 - 6.0 * 4.0 / (4.0 * 15.0);
        assert!((spearman(&x, &[2.0, 1.0, 4.0, 3.0]).unwrap() - oracle).abs() < 1e-15);
        assert!(matches!(spearman(&x, &[1.0; 4]), Err(Error::Undefined(_))));
    }

    /// Rank sums by brute-force counting: rank of v = #(< v) + (#(== v) + 1)/2.
    fn h_oracle(groups: &[Vec<f64>]) -> f64 {
        let pooled: Vec<f64> = groups.iter().flatten().copied().collect();
        let n = pooled.len() as f64;
        let rank = |v: f64| {
            let below = pooled.iter().filter(|&&w| w < v).count() as f64;
            let equal = pooled.iter().filter(|&&w| w == v).count() as f64;
            below + (equal + 1.0) / 2.0
        };
        let s: f64 = groups
            .iter()
            .map(|g| {
                let r: f64 = g.iter().map(|&v| rank(v)).sum();
                r * r / g.len() as f64
            })
            .sum();
        let mut ties = 0.0;
        let mut seen: Vec<f64> = Vec::new();
        for &v in &pooled {
            if !seen.contains(&v) {
                seen.push(v);
                let t = pooled.iter().filter(|&&w| w == v).count() as f64;
                ties += t * t * t - t;
            }
        }
        (12.0 / (n * (n + 1.0)) * s - 3.0 * (n + 1.0)) / (1.0 - ties / (n * n * n - n))
    }

    #[test]
    fn kruskal_separated_groups() {
        let groups = vec![vec![1.0, 2.0, 3.0], vec![101.0, 102.0, 103.0]];
        let r = kruskal_wallis(&groups).unwrap();
        // rank sums 6 and 15: 12/42 * (36/3 + 225/3) - 21 = 27/7
        assert!((r.h - 27.0 / 7.0).abs() < 1e-12);
        assert!((r.h - h_oracle(&groups)).abs() < 1e-12);
        // chi-square(1) tail at 27/7
        assert!((r.p_value - 0.04953461343562649).abs() < 1e-9);
    }

    #[test]
    fn kruskal_equal_mean_ranks_is_zero() {
        let r = kruskal_wallis(&[vec![1.0, 4.0], vec![2.0, 3.0]]).unwrap();
        assert_eq!(r.h, 0.0);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn kruskal_three_singletons() {
        let groups = vec![vec![5.0], vec![1.0], vec![9.0]];
        let r = kruskal_wallis(&groups).unwrap();
        assert!((r.h - h_oracle(&groups)).abs() < 1e-12);
        assert!((r.h - 2.0).abs() < 1e-12);
    }

    #[test]
    fn kruskal_all_tied_is_undefined() {
        assert!(matches!(kruskal_wallis(&[vec![1.0, 1.0], vec![1.0]]), Err(Error::Undefined(_))));
        assert!(kruskal_wallis(&[vec![1.0, 2.0]]).is_err());
        assert!(kruskal_wallis(&[vec![1.0, 2.0], vec![]]).is_err());
    }

    proptest! {
        #[test]
        fn kruskal_matches_oracle(groups in proptest::collection::vec(proptest::collection::vec(0i32..6, 1..6), 2..5)) {
            let groups: Vec<Vec<f64>> = groups.into_iter().map(|g| g.into_iter().map(f64::from).collect()).collect();
            if let Ok(r) = kruskal_wallis(&groups) {
                prop_assert!((r.h - h_oracle(&groups).max(0.0)).abs() < 1e-9);
                prop_assert!(r.h >= 0.0);
            }
        }

        #[test]
        fn kruskal_invariant_under_monotone_transform(groups in proptest::collection::vec(proptest::collection::vec(-20i32..20, 1..6), 2..4)) {
            let groups: Vec<Vec<f64>> = groups.into_iter().map(|g| g.into_iter().map(f64::from).collect()).collect();
            let cubed: Vec<Vec<f64>> = groups.iter().map(|g| g.iter().map(|v| v * v * v + 7.0).collect()).collect();
            match (kruskal_wallis(&groups), kruskal_wallis(&cubed)) {
                (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
                (Err(_), Err(_)) => {}
                _ => prop_assert!(false),
            }
        }

        #[test]
        fn spearman_rank_invariant(pairs in proptest::collection::vec((-50i32..50, -50i32..50), 2..30)) {
            let x: Vec<f64> = pairs.iter().map(|p| f64::from(p.0)).collect();
            let y: Vec<f64> = pairs.iter().map(|p| f64::from(p.1)).collect();
            match (spearman(&x, &y), spearman(&midranks(&x), &midranks(&y))) {
                (Ok(a), Ok(b)) => { prop_assert_eq!(a, b); prop_assert!(a.abs() <= 1.0); }
                (Err(_), Err(_)) => {}
                _ => prop_assert!(false),
            }
        }
    }
}
