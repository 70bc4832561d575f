use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Averaging {
    Macro,
    Micro,
}

fn check<L>(predicted: &[L], truth: &[L]) -> Result<()> {
    if predicted.len() != truth.len() {
        return Err(Error::LengthMismatch {
            left: predicted.len(),
            right: truth.len(),
        });
    }
    if predicted.is_empty() {
        return Err(Error::Empty("no predictions"));
    }
    Ok(())
}

/// Fraction of positions where `predicted` equals `truth`.
pub fn accuracy<T: Scalar, L: PartialEq>(predicted: &[L], truth: &[L]) -> Result<T> {
    check(predicted, truth)?;
    let hits = predicted.iter().zip(truth).filter(|(p, t)| p == t).count();
    Ok(T::from_count(hits) / T::from_count(truth.len()))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Counts {
    tp: usize,
    fp: usize,
    fn_: usize,
}

fn f1_of(c: Counts) -> f64 {
    let denom = 2 * c.tp + c.fp + c.fn_;
    if denom == 0 {
        0.0
    } else {
        (2 * c.tp) as f64 / denom as f64
    }
}

/// Single-label multi-class F1.
///
/// `classes` is the label universe for macro averaging; every listed class
/// counts, including ones absent from both sequences (they score 0). Labels
/// seen in the data but missing from `classes` are added to it.
pub fn f1<T: Scalar, L: Ord + Clone>(
    predicted: &[L],
    truth: &[L],
    averaging: Averaging,
    classes: &[L],
) -> Result<T> {
    check(predicted, truth)?;
    let mut counts: BTreeMap<L, Counts> = classes
        .iter()
        .map(|c| (c.clone(), Counts::default()))
        .collect();
    for (p, t) in predicted.iter().zip(truth) {
        if p == t {
            counts.entry(p.clone()).or_default().tp += 1;
        } else {
            counts.entry(p.clone()).or_default().fp += 1;
            counts.entry(t.clone()).or_default().fn_ += 1;
        }
    }
    let value = match averaging {
        Averaging::Micro => {
            let pooled = counts.values().fold(Counts::default(), |a, c| Counts {
                tp: a.tp + c.tp,
                fp: a.fp + c.fp,
                fn_: a.fn_ + c.fn_,
            });
            f1_of(pooled)
        }
        Averaging::Macro => counts.values().map(|c| f1_of(*c)).sum::<f64>() / counts.len() as f64,
    };
    Ok(T::lit(value))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accuracy_cases() {
        assert_eq!(accuracy::<f64, _>(&[1, 2, 3], &[1, 2, 3]).unwrap(), 1.0);
        let v: f64 = accuracy(&['a', 'b', 'a'], &['a', 'a', 'a']).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-15);
        assert!(matches!(
            accuracy::<f64, i32>(&[], &[]),
            Err(Error::Empty(_))
        ));
        assert!(matches!(
            accuracy::<f64, _>(&[1], &[1, 2]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn perfect_f1() {
        let classes: Vec<u8> = (0..8).collect();
        let labels = [0u8, 3, 5, 7, 3];
        // unseen classes count as zero in the macro average
        let macro_: f64 = f1(&labels, &labels, Averaging::Macro, &labels).unwrap();
        assert_eq!(macro_, 1.0);
        assert_eq!(
            f1::<f64, _>(&labels, &labels, Averaging::Micro, &classes).unwrap(),
            1.0
        );
        let macro8: f64 = f1(&labels, &labels, Averaging::Macro, &classes).unwrap();
        assert_eq!(macro8, 4.0 / 8.0);
    }

    #[test]
    fn hand_computed_confusion() {
        // predicted [a, a] vs truth [a, b]: TP_a=1, FP_a=1, FN_b=1
        let classes: Vec<u8> = (0..8).collect();
        let micro: f64 = f1(&[0u8, 0], &[0, 1], Averaging::Micro, &classes).unwrap();
        assert_eq!(micro, 0.5);
        let macro_: f64 = f1(&[0u8, 0], &[0, 1], Averaging::Macro, &classes).unwrap();
        assert!((macro_ - (2.0 / 3.0) / 8.0).abs() < 1e-15);
        let macro2: f64 = f1(&[0u8, 0], &[0, 1], Averaging::Macro, &[0, 1]).unwrap();
        assert!((macro2 - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn mismatched_lengths() {
        assert!(f1::<f64, u8>(&[1], &[], Averaging::Macro, &[]).is_err());
    }
}
