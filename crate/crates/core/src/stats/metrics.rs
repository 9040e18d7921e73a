use serde::{Deserialize, Serialize};

use super::rank::midranks;
use crate::error::{Error, Result};

fn class_counts(labels: &[u8]) -> (usize, usize) {
    let pos = labels.iter().filter(|&&l| l == 1).count();
    (pos, labels.len() - pos)
}

/// Area under the ROC curve as the Mann-Whitney statistic:
/// `P(s_pos > s_neg) + 0.5 * P(s_pos = s_neg)`.
pub fn auroc(scores: &[f64], labels: &[u8]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::Shape { expected: labels.len(), got: scores.len() });
    }
    let (pos, neg) = class_counts(labels);
    if pos == 0 || neg == 0 {
        return Err(Error::Undefined("AUROC with a single class"));
    }
    let ranks = midranks(scores);
    let rank_sum: f64 = ranks.iter().zip(labels).filter(|(_, &l)| l == 1).map(|(r, _)| r).sum();
    let u = rank_sum - (pos * (pos + 1)) as f64 / 2.0;
    Ok(u / (pos as f64 * neg as f64))
}

/// How tied scores are walked when computing average precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ApConvention {
    /// Score-descending order, ties kept in input order; precision is taken
    /// at every positive.
    StableOrder,
    /// Each distinct score is one threshold; a tied block contributes its
    /// recall increment at the block's precision.
    TiedBlocks,
}

impl ApConvention {
    pub fn as_str(self) -> &'static str {
        match self {
            ApConvention::StableOrder => "average-precision/stable-order",
            ApConvention::TiedBlocks => "average-precision/tied-blocks",
        }
    }
}

/// Area under the precision-recall curve as (rectangular) average precision.
pub fn auprc(scores: &[f64], labels: &[u8], convention: ApConvention) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::Shape { expected: labels.len(), got: scores.len() });
    }
    let (pos, _) = class_counts(labels);
    if pos == 0 {
        return Err(Error::Undefined("AUPRC without positives"));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let total = pos as f64;
    let mut ap = 0.0;
    match convention {
        ApConvention::StableOrder => {
            let mut tp = 0usize;
            for (k, &i) in order.iter().enumerate() {
                if labels[i] == 1 {
                    tp += 1;
                    ap += tp as f64 / (k + 1) as f64;
                }
            }
            ap /= total;
        }
        ApConvention::TiedBlocks => {
            let (mut tp, mut seen) = (0usize, 0usize);
            for block in order.chunk_by(|&a, &b| scores[a] == scores[b]) {
                let block_tp = block.iter().filter(|&&i| labels[i] == 1).count();
                tp += block_tp;
                seen += block.len();
                ap += (block_tp as f64 / total) * (tp as f64 / seen as f64);
            }
        }
    }
    Ok(ap)
}
