//! Example-based label-ranking metrics.
//!
//! The rank of label `y` is the number of labels scoring at least as high as
//! `y`, so tied labels all take the worst rank of their group.

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, Zero};

use crate::error::{Error, Result};
use crate::metrics::{MetricValue, RankedInstance};
use crate::scalar::Scalar;

/// Per-instance quantities shared by all three ranking metrics.
struct RankSummary {
    /// For every true label: (rank, number of true labels ranked at or above it).
    true_ranks: Vec<(usize, usize)>,
    positives: usize,
    negatives: usize,
}

fn summarize<T: Scalar>(inst: &RankedInstance<T>) -> RankSummary {
    let scores = inst.scores();
    let truth = inst.truth();
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .expect("scores are finite")
    });

    let mut true_ranks = Vec::new();
    let mut trues_so_far = 0;
    let mut start = 0;
    while start < order.len() {
        let s = scores[order[start]];
        let mut end = start;
        while end < order.len() && scores[order[end]] == s {
            end += 1;
        }
        let group_trues = order[start..end].iter().filter(|&&i| truth[i]).count();
        trues_so_far += group_trues;
        true_ranks.extend(std::iter::repeat_n((end, trues_so_far), group_trues));
        start = end;
    }
    let positives = true_ranks.len();
    RankSummary {
        true_ranks,
        positives,
        negatives: scores.len() - positives,
    }
}

fn mean_over_usable<T: Scalar>(
    metric: &'static str,
    instances: &[RankedInstance<T>],
    per_instance: impl Fn(&RankSummary) -> T,
) -> Result<MetricValue<T>> {
    let mut sum = T::zero();
    let mut used = 0;
    let mut excluded = 0;
    for inst in instances {
        let summary = summarize(inst);
        if summary.positives == 0 || summary.negatives == 0 {
            excluded += 1;
            continue;
        }
        sum += per_instance(&summary);
        used += 1;
    }
    if used == 0 {
        return Err(Error::NoUsableInstances { metric, excluded });
    }
    Ok(MetricValue {
        value: sum / T::from_count(used),
        used,
        excluded,
    })
}

/// Mean over instances of `(1/|Y|) * sum_{y in Y} |{y' in Y : rank(y') <= rank(y)}| / rank(y)`.
pub fn label_ranking_average_precision<T: Scalar>(
    instances: &[RankedInstance<T>],
) -> Result<MetricValue<T>> {
    mean_over_usable("label ranking average precision", instances, |s| {
        if let Some(exact) = exact_precision(s) {
            return exact;
        }
        let total: T = s
            .true_ranks
            .iter()
            .map(|&(rank, above)| T::from_count(above) / T::from_count(rank))
            .sum();
        total / T::from_count(s.positives)
    })
}

/// The per-instance average precision as an exact fraction, rounded once.
/// `None` when the fraction or its conversion would not be exact.
fn exact_precision<T: Scalar>(s: &RankSummary) -> Option<T> {
    let sum = s
        .true_ranks
        .iter()
        .try_fold(Ratio::<u128>::zero(), |acc, &(rank, above)| {
            acc.checked_add(&Ratio::new(above as u128, rank as u128))
        })?;
    let q = sum.checked_mul(&Ratio::from_integer(s.positives as u128).recip())?;
    let exact = |n: u128| T::from_u128(n).filter(|t| t.to_u128() == Some(n));
    Some(exact(*q.numer())? / exact(*q.denom())?)
}

/// Mean over instances of the worst rank held by a true label.
pub fn coverage_error<T: Scalar>(instances: &[RankedInstance<T>]) -> Result<MetricValue<T>> {
    mean_over_usable("coverage error", instances, |s| {
        T::from_count(
            s.true_ranks
                .iter()
                .map(|(rank, _)| *rank)
                .max()
                .unwrap_or(0),
        )
    })
}

/// Mean over instances of the fraction of (true, false) label pairs where
/// the false label scores at least as high as the true one.
pub fn ranking_loss<T: Scalar>(instances: &[RankedInstance<T>]) -> Result<MetricValue<T>> {
    mean_over_usable("ranking loss", instances, |s| {
        // labels at or above a true label's rank that are false
        let violations: usize = s.true_ranks.iter().map(|(rank, above)| rank - above).sum();
        T::from_count(violations) / T::from_count(s.positives * s.negatives)
    })
}
