use crate::error::{Error, Result};
use crate::metrics::RankedInstance;
use crate::scalar::Scalar;

/// Area under the ROC curve: the probability that a random positive scores
/// above a random negative, ties counted as one half.
///
/// Computed from mid-ranks (Mann–Whitney U) in `O(n log n)`.
pub fn auroc<T: Scalar>(scores: &[T], truth: &[bool]) -> Result<T> {
    auroc_named(scores, truth, None)
}

pub(crate) fn auroc_named<T: Scalar>(
    scores: &[T],
    truth: &[bool],
    class: Option<&str>,
) -> Result<T> {
    if scores.len() != truth.len() {
        return Err(Error::LengthMismatch {
            left: scores.len(),
            right: truth.len(),
        });
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::InvalidInput("AUROC scores must be finite".into()));
    }
    let positives = truth.iter().filter(|t| **t).count();
    let negatives = truth.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::SingleClass {
            what: "AUROC",
            class: class.map(str::to_owned),
        });
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).expect("finite"));

    // sum of 1-based positive ranks, doubled so mid-ranks stay integral
    let mut doubled_rank_sum: u128 = 0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start;
        while end < order.len() && scores[order[end]] == scores[order[start]] {
            end += 1;
        }
        let group_pos = order[start..end].iter().filter(|&&i| truth[i]).count() as u128;
        let doubled_mid = (start + 1 + end) as u128;
        doubled_rank_sum += group_pos * doubled_mid;
        start = end;
    }
    let p = positives as u128;
    // 2U = 2 * (rank_sum - P(P+1)/2)
    let doubled_u = doubled_rank_sum - p * (p + 1);
    let pairs = (positives as u128) * (negatives as u128);
    Ok(T::lit(doubled_u as f64) / T::lit(2.0 * pairs as f64))
}

/// AUROC of each label column across instances; `names` labels the errors.
pub fn per_class_auroc<T: Scalar>(
    instances: &[RankedInstance<T>],
    names: &[&str],
) -> Result<Vec<Result<T>>> {
    let labels = check_widths(instances)?;
    Ok((0..labels)
        .map(|c| {
            let scores: Vec<T> = instances.iter().map(|i| i.scores()[c]).collect();
            let truth: Vec<bool> = instances.iter().map(|i| i.truth()[c]).collect();
            auroc_named(&scores, &truth, Some(names.get(c).copied().unwrap_or("?")))
        })
        .collect())
}

/// AUROC over every (instance, label) cell pooled together.
pub fn micro_average_auroc<T: Scalar>(instances: &[RankedInstance<T>]) -> Result<T> {
    check_widths(instances)?;
    let scores: Vec<T> = instances
        .iter()
        .flat_map(|i| i.scores().iter().copied())
        .collect();
    let truth: Vec<bool> = instances
        .iter()
        .flat_map(|i| i.truth().iter().copied())
        .collect();
    auroc_named(&scores, &truth, Some("micro-average"))
}

fn check_widths<T: Scalar>(instances: &[RankedInstance<T>]) -> Result<usize> {
    let first = instances.first().ok_or(Error::Empty("no instances"))?.len();
    for inst in instances {
        if inst.len() != first {
            return Err(Error::LengthMismatch {
                left: first,
                right: inst.len(),
            });
        }
    }
    Ok(first)
}
