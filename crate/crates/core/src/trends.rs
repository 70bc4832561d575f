//! Per-day emotion distributions, distribution comparison across subsets,
//! variance ranking and spike detection.

use std::collections::BTreeMap;
use std::io::{self, Write};

use chrono::NaiveDate;

use crate::corpus::{Emotion, NUM_EMOTIONS};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Emotion fractions for one day. A zero-count day has all-zero fractions.
#[derive(Debug, Clone, PartialEq)]
pub struct DailyDistribution<T> {
    pub date: NaiveDate,
    pub count: usize,
    pub fractions: [T; NUM_EMOTIONS],
}

impl<T: Scalar> DailyDistribution<T> {
    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn fraction(&self, emotion: Emotion) -> T {
        self.fractions[emotion.index()]
    }
}

/// Normalized label counts.
fn distribution<T: Scalar>(counts: &[usize; NUM_EMOTIONS]) -> (usize, [T; NUM_EMOTIONS]) {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return (0, [T::zero(); NUM_EMOTIONS]);
    }
    let n = T::from_count(total);
    (total, counts.map(|c| T::from_count(c) / n))
}

/// Contiguous, gap-free daily series.
#[derive(Debug, Clone, PartialEq)]
pub struct TrendSeries<T> {
    days: Vec<DailyDistribution<T>>,
}

impl<T: Scalar> TrendSeries<T> {
    pub fn days(&self) -> &[DailyDistribution<T>] {
        &self.days
    }

    pub fn len(&self) -> usize {
        self.days.len()
    }

    pub fn is_empty(&self) -> bool {
        self.days.is_empty()
    }

    /// Dates of zero-count days.
    pub fn empty_days(&self) -> Vec<NaiveDate> {
        self.days
            .iter()
            .filter(|d| d.is_empty())
            .map(|d| d.date)
            .collect()
    }

    /// `date,count,anger,...,trust` with six-decimal fractions.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        write!(out, "date,count")?;
        for e in Emotion::ALL {
            write!(out, ",{e}")?;
        }
        writeln!(out)?;
        for d in &self.days {
            write!(out, "{},{}", d.date.format("%Y-%m-%d"), d.count)?;
            for f in &d.fractions {
                write!(out, ",{:.6}", f.as_f64())?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Counts the predicted label of every prediction dated within
/// `from..=to`, one entry per calendar day. Days without predictions are
/// kept with a zero count.
pub fn daily_emotion_distribution<T: Scalar>(
    predictions: impl IntoIterator<Item = (NaiveDate, Emotion)>,
    from: NaiveDate,
    to: NaiveDate,
) -> Result<TrendSeries<T>> {
    if to < from {
        return Err(Error::InvalidInput(format!(
            "empty date range {from}..={to}"
        )));
    }
    let mut counts: BTreeMap<NaiveDate, [usize; NUM_EMOTIONS]> = from
        .iter_days()
        .take_while(|d| *d <= to)
        .map(|d| (d, [0; NUM_EMOTIONS]))
        .collect();
    for (date, label) in predictions {
        if let Some(c) = counts.get_mut(&date) {
            c[label.index()] += 1;
        }
    }
    let days = counts
        .into_iter()
        .map(|(date, c)| {
            let (count, fractions) = distribution(&c);
            DailyDistribution {
                date,
                count,
                fractions,
            }
        })
        .collect();
    Ok(TrendSeries { days })
}

/// Aggregate distribution of one named subset.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetDistribution<T> {
    pub name: String,
    pub count: usize,
    /// All zeros for an empty subset.
    pub fractions: [T; NUM_EMOTIONS],
}

impl<T: Scalar> SubsetDistribution<T> {
    pub fn is_empty(&self) -> bool {
        self.count == 0
    }
}

pub fn compare_distributions<T: Scalar, I>(
    subsets: impl IntoIterator<Item = (String, I)>,
) -> Vec<SubsetDistribution<T>>
where
    I: IntoIterator<Item = Emotion>,
{
    subsets
        .into_iter()
        .map(|(name, labels)| {
            let mut c = [0usize; NUM_EMOTIONS];
            for l in labels {
                c[l.index()] += 1;
            }
            let (count, fractions) = distribution(&c);
            SubsetDistribution {
                name,
                count,
                fractions,
            }
        })
        .collect()
}

/// Population variance of each emotion's daily fraction over the non-empty
/// days, highest first; ties keep canonical order.
pub fn variance_ranking<T: Scalar>(series: &TrendSeries<T>) -> Result<Vec<(Emotion, T)>> {
    let usable: Vec<&DailyDistribution<T>> = series.days.iter().filter(|d| !d.is_empty()).collect();
    if usable.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "variance ranking needs at least 2 days with predictions, found {}",
            usable.len()
        )));
    }
    let mut ranked: Vec<(Emotion, T)> = Emotion::ALL
        .iter()
        .map(|&e| {
            let values: Vec<T> = usable.iter().map(|d| d.fraction(e)).collect();
            (e, population_variance(&values))
        })
        .collect();
    ranked.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.0.cmp(&b.0))
    });
    Ok(ranked)
}

fn mean<T: Scalar>(values: &[T]) -> T {
    values.iter().copied().sum::<T>() / T::from_count(values.len())
}

fn population_variance<T: Scalar>(values: &[T]) -> T {
    let m = mean(values);
    values.iter().map(|v| (*v - m).powi(2)).sum::<T>() / T::from_count(values.len())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpikeReport<T> {
    pub emotion: Emotion,
    pub date: NaiveDate,
    /// Fraction change from the previous non-empty day.
    pub delta: T,
    pub zscore: T,
}

pub const DEFAULT_Z_THRESHOLD: f64 = 2.0;

/// Flags days whose rise in `emotion`'s fraction over the previous non-empty
/// day is positive and exceeds `mean + z_threshold * stdev` of all such
/// day-over-day changes (population standard deviation). Zero-count days do
/// not contribute changes.
pub fn detect_spikes<T: Scalar>(
    series: &TrendSeries<T>,
    emotion: Emotion,
    z_threshold: T,
) -> Result<Vec<SpikeReport<T>>> {
    if series.len() < 4 {
        return Err(Error::InvalidInput(format!(
            "spike detection needs at least 4 days, found {}",
            series.len()
        )));
    }
    let usable: Vec<&DailyDistribution<T>> = series.days.iter().filter(|d| !d.is_empty()).collect();
    let deltas: Vec<(NaiveDate, T)> = usable
        .windows(2)
        .map(|w| (w[1].date, w[1].fraction(emotion) - w[0].fraction(emotion)))
        .collect();
    if deltas.is_empty() {
        return Ok(Vec::new());
    }
    let values: Vec<T> = deltas.iter().map(|(_, d)| *d).collect();
    let m = mean(&values);
    let sd = population_variance(&values).sqrt();
    if sd <= T::zero() {
        return Ok(Vec::new());
    }
    Ok(deltas
        .into_iter()
        .filter(|(_, d)| *d > T::zero() && *d > m + z_threshold * sd)
        .map(|(date, delta)| SpikeReport {
            emotion,
            date,
            delta,
            zscore: (delta - m) / sd,
        })
        .collect())
}
