use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A contiguous block of day indices `start..=end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fold {
    pub index: usize,
    pub start: usize,
    pub end: usize,
}

impl Fold {
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, day: usize) -> bool {
        (self.start..=self.end).contains(&day)
    }
}

/// `k` contiguous folds over `0..n` in date order. The `n % k` leftover days
/// go one each to the earliest folds.
pub fn make_folds(n: usize, k: usize) -> Result<Vec<Fold>> {
    if k == 0 || n < k {
        return Err(Error::invalid(format!("cannot split {n} days into {k} folds")));
    }
    let (base, extra) = (n / k, n % k);
    let mut start = 0;
    Ok((0..k)
        .map(|index| {
            let len = base + usize::from(index < extra);
            let fold = Fold { index, start, end: start + len - 1 };
            start += len;
            fold
        })
        .collect())
}

/// Days purged from training around `fold`: every day outside the fold with
/// `start - width <= d <= end + width`, clipped to `0..n`.
pub fn purge_rows(fold: &Fold, width: usize, n: usize) -> Vec<usize> {
    let lo = fold.start.saturating_sub(width);
    let hi = (fold.end + width).min(n.saturating_sub(1));
    (lo..fold.start).chain(fold.end + 1..=hi).collect()
}

/// Days outside the fold and its purge zone.
pub fn candidate_training_days(fold: &Fold, width: usize, n: usize) -> Vec<usize> {
    let lo = fold.start.saturating_sub(width);
    let hi = fold.end + width;
    (0..n).filter(|&d| d < lo || d > hi).collect()
}

/// Errors if any training row's input window shares a raw day with any test
/// row's input window. A row for day `d` reads days `d - lookback .. d`.
pub fn check_window_separation(train_days: &[usize], test_days: &[usize], lookback: usize) -> Result<()> {
    let (Some(&first), Some(&last)) = (test_days.iter().min(), test_days.iter().max()) else {
        return Ok(());
    };
    // union of test windows: first - lookback ..= last - 1
    let lo = first.saturating_sub(lookback);
    for &d in train_days {
        let (a, b) = (d.saturating_sub(lookback), d.saturating_sub(1));
        if a <= last.saturating_sub(1) && b >= lo {
            return Err(Error::invalid(format!("training day {d} shares window days with the test fold")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sizes(n: usize, k: usize) -> Vec<usize> {
        make_folds(n, k).unwrap().iter().map(Fold::len).collect()
    }

    #[test]
    fn fold_sizes() {
        assert_eq!(sizes(1413, 5), vec![283, 283, 283, 282, 282]);
        assert_eq!(sizes(10, 5), vec![2; 5]);
        assert_eq!(sizes(11, 5), vec![3, 2, 2, 2, 2]);
        assert!(make_folds(4, 5).is_err());
    }

    #[test]
    fn purge_examples() {
        let mid = Fold { index: 1, start: 101, end: 200 };
        let p = purge_rows(&mid, 5, 300);
        assert_eq!(p, (96..=100).chain(201..=205).collect::<Vec<_>>());
        let last = Fold { index: 4, start: 1131, end: 1412 };
        assert_eq!(purge_rows(&last, 14, 1413), (1117..=1130).collect::<Vec<_>>());
        assert_eq!(purge_rows(&mid, 1, 300), vec![100, 201]);
    }

    proptest! {
        #[test]
        fn folds_partition(n in 1usize..500, k in 1usize..12) {
            prop_assume!(n >= k);
            let folds = make_folds(n, k).unwrap();
            let mut next = 0;
            for f in &folds {
                prop_assert_eq!(f.start, next);
                next = f.end + 1;
            }
            prop_assert_eq!(next, n);
            prop_assert!(folds.windows(2).all(|w| w[0].len() >= w[1].len()));
        }

        #[test]
        fn purged_training_is_separated(n in 30usize..300, k in 2usize..6, width in 1usize..15) {
            prop_assume!(n >= k);
            for fold in make_folds(n, k).unwrap() {
                let train: Vec<usize> = candidate_training_days(&fold, width, n).into_iter().filter(|&d| d >= width).collect();
                let test: Vec<usize> = (fold.start..=fold.end).filter(|&d| d >= width).collect();
                prop_assert!(check_window_separation(&train, &test, width).is_ok());
                // train, purge and fold days are disjoint and cover 0..n
                let purged = purge_rows(&fold, width, n);
                let all = candidate_training_days(&fold, width, n).len() + purged.len() + fold.len();
                prop_assert_eq!(all, n);
            }
        }
    }

    #[test]
    fn overlap_is_detected() {
        // day 9 reads days 5..=8, the test fold at 10 reads 6..=9 with lookback 4
        assert!(check_window_separation(&[9], &[10, 11], 4).is_err());
        assert!(check_window_separation(&[5], &[10, 11], 4).is_ok());
        // day 14 reads 10..=13, and day 11 reads 7..=10
        assert!(check_window_separation(&[14], &[10, 11], 4).is_err());
        assert!(check_window_separation(&[15], &[10, 11], 4).is_ok());
    }
}
