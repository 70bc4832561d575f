//! Evaluation metrics for single-label and multi-label emotion classifiers.
//!
//! Ranking metrics (average precision, coverage error, ranking loss) follow
//! the worst-rank tie convention; AUROC gives ties half credit. Everything
//! accepts any label count, eight being the pipeline default.

mod auroc;
mod classification;
mod ranking;
pub mod report;

pub use auroc::{auroc, micro_average_auroc, per_class_auroc};
pub use classification::{accuracy, f1, Averaging};
pub use ranking::{coverage_error, label_ranking_average_precision, ranking_loss};
pub use report::{evaluate_multi, evaluate_single, EvaluationReport};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Scores and binary ground truth for one multi-label example.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedInstance<T> {
    scores: Vec<T>,
    truth: Vec<bool>,
}

impl<T: Scalar> RankedInstance<T> {
    pub fn new(scores: Vec<T>, truth: Vec<bool>) -> Result<Self> {
        if scores.len() != truth.len() {
            return Err(Error::LengthMismatch {
                left: scores.len(),
                right: truth.len(),
            });
        }
        if scores.is_empty() {
            return Err(Error::Empty("instance has no labels"));
        }
        if scores.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidInput("instance scores must be finite".into()));
        }
        Ok(Self { scores, truth })
    }

    pub fn scores(&self) -> &[T] {
        &self.scores
    }

    pub fn truth(&self) -> &[bool] {
        &self.truth
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// True when the truth vector mixes positives and negatives, which the
    /// ranking metrics require.
    pub fn is_rankable(&self) -> bool {
        self.truth.iter().any(|t| *t) && self.truth.iter().any(|t| !*t)
    }
}

/// A ranking metric averaged over the usable instances of a batch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricValue<T> {
    pub value: T,
    pub used: usize,
    /// Instances skipped because their truth was all-positive or all-negative.
    pub excluded: usize,
}
