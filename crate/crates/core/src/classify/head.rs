use serde::{Deserialize, Serialize};

use crate::classify::backend::Features;
use crate::corpus::NUM_EMOTIONS;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HeadKind {
    /// Softmax over the eight emotions, trained with cross-entropy.
    Single,
    /// Independent sigmoid per emotion, trained with binary cross-entropy.
    Multi,
}

impl std::str::FromStr for HeadKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "single" => Ok(HeadKind::Single),
            "multi" => Ok(HeadKind::Multi),
            other => Err(crate::Error::InvalidInput(format!(
                "unknown head kind `{other}`"
            ))),
        }
    }
}

impl std::fmt::Display for HeadKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            HeadKind::Single => "single",
            HeadKind::Multi => "multi",
        })
    }
}

/// Training target for one example.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Class(usize),
    Labels([bool; NUM_EMOTIONS]),
}

/// Fully-connected layer mapping features to eight logits.
/// Weights are stored row-major: one row of `width` values per emotion.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearHead<T> {
    kind: HeadKind,
    width: usize,
    weights: Vec<T>,
    bias: [T; NUM_EMOTIONS],
}

impl<T: Scalar> LinearHead<T> {
    pub fn zeros(kind: HeadKind, width: usize) -> Self {
        Self {
            kind,
            width,
            weights: vec![T::zero(); NUM_EMOTIONS * width],
            bias: [T::zero(); NUM_EMOTIONS],
        }
    }

    pub fn kind(&self) -> HeadKind {
        self.kind
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut [T] {
        &mut self.weights
    }

    pub fn bias(&self) -> &[T; NUM_EMOTIONS] {
        &self.bias
    }

    pub fn bias_mut(&mut self) -> &mut [T; NUM_EMOTIONS] {
        &mut self.bias
    }

    pub fn get(&self, class: usize, column: usize) -> T {
        self.weights[class * self.width + column]
    }

    pub fn set(&mut self, class: usize, column: usize, value: T) {
        self.weights[class * self.width + column] = value;
    }

    /// L2 norm of the weight column (one entry per emotion) at `column`.
    pub fn column_norm(&self, column: usize) -> T {
        (0..NUM_EMOTIONS)
            .map(|c| self.get(c, column).powi(2))
            .sum::<T>()
            .sqrt()
    }

    /// Columns with at least one non-zero weight, ascending.
    pub fn nonzero_columns(&self) -> Vec<usize> {
        (0..self.width)
            .filter(|&j| (0..NUM_EMOTIONS).any(|c| !self.get(c, j).is_zero()))
            .collect()
    }

    pub fn logits(&self, x: &Features<T>) -> [T; NUM_EMOTIONS] {
        let mut z = self.bias;
        for (c, zc) in z.iter_mut().enumerate() {
            let row = &self.weights[c * self.width..(c + 1) * self.width];
            for &(j, v) in x.entries() {
                *zc += row[j] * v;
            }
        }
        z
    }

    /// Softmax probabilities (single head) or per-label sigmoids (multi head).
    pub fn probabilities(&self, x: &Features<T>) -> [T; NUM_EMOTIONS] {
        activate(self.kind, &self.logits(x))
    }
}

pub fn activate<T: Scalar>(kind: HeadKind, logits: &[T; NUM_EMOTIONS]) -> [T; NUM_EMOTIONS] {
    match kind {
        HeadKind::Single => softmax(logits),
        HeadKind::Multi => logits.map(sigmoid),
    }
}

pub fn softmax<T: Scalar>(z: &[T; NUM_EMOTIONS]) -> [T; NUM_EMOTIONS] {
    let max = z.iter().copied().fold(T::neg_infinity(), T::max);
    let e = z.map(|v| (v - max).exp());
    let sum: T = e.iter().copied().sum();
    e.map(|v| v / sum)
}

pub fn sigmoid<T: Scalar>(z: T) -> T {
    if z >= T::zero() {
        T::one() / (T::one() + (-z).exp())
    } else {
        let e = z.exp();
        e / (T::one() + e)
    }
}

/// `log(sum(exp(z)))` without overflow.
fn log_sum_exp<T: Scalar>(z: &[T; NUM_EMOTIONS]) -> T {
    let max = z.iter().copied().fold(T::neg_infinity(), T::max);
    max + z.iter().map(|v| (*v - max).exp()).sum::<T>().ln()
}

/// Binary cross-entropy of `sigmoid(z)` against `y`, computed from the logit.
fn bce_with_logit<T: Scalar>(z: T, y: bool) -> T {
    let softplus = z.max(T::zero()) + (-z.abs()).exp().ln_1p();
    if y {
        softplus - z
    } else {
        softplus
    }
}

/// Training objective with its gradient.
#[derive(Debug, Clone)]
pub struct Objective<T> {
    pub loss: T,
    /// Same layout as [`LinearHead::weights`].
    pub weight_grad: Vec<T>,
    pub bias_grad: [T; NUM_EMOTIONS],
}

/// Mean loss over `data` plus `l2 / 2 * ||W||^2` (bias unpenalized).
///
/// Single head: softmax cross-entropy. Multi head: binary cross-entropy
/// averaged over the eight labels, then over examples.
///
/// Panics if a target variant does not match the head kind.
pub fn objective<T: Scalar>(
    head: &LinearHead<T>,
    data: &[(Features<T>, Target)],
    l2: T,
) -> Objective<T> {
    let n = T::from_count(data.len().max(1));
    let labels = T::from_count(NUM_EMOTIONS);
    let mut loss = T::zero();
    let mut weight_grad = vec![T::zero(); head.weights.len()];
    let mut bias_grad = [T::zero(); NUM_EMOTIONS];

    for (x, target) in data {
        let z = head.logits(x);
        let residual: [T; NUM_EMOTIONS] = match (head.kind, target) {
            (HeadKind::Single, Target::Class(k)) => {
                loss += log_sum_exp(&z) - z[*k];
                let mut p = softmax(&z);
                p[*k] -= T::one();
                p
            }
            (HeadKind::Multi, Target::Labels(y)) => {
                let mut r = [T::zero(); NUM_EMOTIONS];
                for c in 0..NUM_EMOTIONS {
                    loss += bce_with_logit(z[c], y[c]) / labels;
                    let yc = if y[c] { T::one() } else { T::zero() };
                    r[c] = (sigmoid(z[c]) - yc) / labels;
                }
                r
            }
            (kind, target) => panic!("target {target:?} does not fit a {kind} head"),
        };
        for c in 0..NUM_EMOTIONS {
            let g = residual[c] / n;
            bias_grad[c] += g;
            let row = &mut weight_grad[c * head.width..(c + 1) * head.width];
            for &(j, v) in x.entries() {
                row[j] += g * v;
            }
        }
    }
    loss /= n;

    if l2 > T::zero() {
        let half = T::lit(0.5);
        let mut sq = T::zero();
        for (g, w) in weight_grad.iter_mut().zip(&head.weights) {
            if !w.is_zero() {
                sq += *w * *w;
                *g += l2 * *w;
            }
        }
        loss += half * l2 * sq;
    }
    Objective {
        loss,
        weight_grad,
        bias_grad,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn softmax_is_a_simplex_even_for_large_logits() {
        let p = softmax(&[1000.0, 999.0, -5.0, 0.0, 0.0, 3.0, 2.0, 1.0f64]);
        assert!(p.iter().all(|v| *v >= 0.0));
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p[0] > p[1]);
    }

    #[test]
    fn sigmoid_is_stable() {
        assert_eq!(sigmoid(0.0f64), 0.5);
        assert!(sigmoid(-800.0f64) >= 0.0);
        assert!(sigmoid(800.0f64) <= 1.0);
        assert!((sigmoid(2.0f64) + sigmoid(-2.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bce_matches_naive_formula() {
        for &(z, y) in &[(0.3f64, true), (-1.2, false), (2.5, false), (-0.1, true)] {
            let p = sigmoid(z);
            let naive = if y { -p.ln() } else { -(1.0 - p).ln() };
            assert!((bce_with_logit(z, y) - naive).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_head_loss_values() {
        let head = LinearHead::<f64>::zeros(HeadKind::Single, 4);
        let x = Features::from_dense(&[1.0, 0.0, 0.0, 0.0]);
        let obj = objective(&head, &[(x.clone(), Target::Class(2))], 0.0);
        assert!((obj.loss - 8f64.ln()).abs() < 1e-12);

        let head = LinearHead::<f64>::zeros(HeadKind::Multi, 4);
        let obj = objective(&head, &[(x, Target::Labels([true; 8]))], 0.0);
        assert!((obj.loss - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn f32_head_works() {
        let mut head = LinearHead::<f32>::zeros(HeadKind::Multi, 3);
        head.set(1, 2, 2.0);
        let x = Features::from_dense(&[0.0f32, 0.0, 1.0]);
        let p = head.probabilities(&x);
        assert!((p[1] - sigmoid(2.0f32)).abs() < 1e-6);
        assert_eq!(head.nonzero_columns(), vec![2]);
        assert_eq!(head.column_norm(2), 2.0);
    }
}
