use std::collections::BTreeMap;
use std::fmt;

use crate::classify::head::LinearHead;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::text::TokenSequence;

/// Sparse fixed-width feature vector. Entries are sorted by index and unique.
#[derive(Debug, Clone, PartialEq)]
pub struct Features<T> {
    width: usize,
    entries: Vec<(usize, T)>,
}

impl<T: Scalar> Features<T> {
    pub fn from_sparse(width: usize, mut entries: Vec<(usize, T)>) -> Result<Self> {
        entries.sort_by_key(|(i, _)| *i);
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidInput("duplicate feature index".into()));
        }
        if entries.last().is_some_and(|(i, _)| *i >= width) {
            return Err(Error::InvalidInput("feature index out of range".into()));
        }
        Ok(Self { width, entries })
    }

    pub fn from_dense(values: &[T]) -> Self {
        Self {
            width: values.len(),
            entries: values
                .iter()
                .copied()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .collect(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn entries(&self) -> &[(usize, T)] {
        &self.entries
    }

    pub fn to_dense(&self) -> Vec<T> {
        let mut v = vec![T::zero(); self.width];
        for &(i, x) in &self.entries {
            v[i] = x;
        }
        v
    }

    pub fn dot(&self, other: &Features<T>) -> T {
        let (mut a, mut b) = (
            self.entries.iter().peekable(),
            other.entries.iter().peekable(),
        );
        let mut acc = T::zero();
        while let (Some(&&(i, x)), Some(&&(j, y))) = (a.peek(), b.peek()) {
            match i.cmp(&j) {
                std::cmp::Ordering::Less => {
                    a.next();
                }
                std::cmp::Ordering::Greater => {
                    b.next();
                }
                std::cmp::Ordering::Equal => {
                    acc += x * y;
                    a.next();
                    b.next();
                }
            }
        }
        acc
    }

    pub fn norm(&self) -> T {
        self.entries.iter().map(|(_, x)| *x * *x).sum::<T>().sqrt()
    }
}

/// Output of an encoder for one token sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Encoding<T> {
    pub features: Features<T>,
    /// One non-negative value per token.
    pub salience: Vec<T>,
}

/// Identifies a backend inside a model file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BackendSpec {
    Reference { width_exponent: u8 },
    Transformer { artifact: String },
}

impl fmt::Display for BackendSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BackendSpec::Reference { width_exponent } => write!(f, "reference:{width_exponent}"),
            BackendSpec::Transformer { artifact } => write!(f, "transformer:{artifact}"),
        }
    }
}

impl std::str::FromStr for BackendSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reference" => {
                return Ok(BackendSpec::Reference {
                    width_exponent: DEFAULT_WIDTH_EXPONENT,
                })
            }
            "transformer" => {
                return Ok(BackendSpec::Transformer {
                    artifact: DEFAULT_ARTIFACT.to_owned(),
                })
            }
            _ => {}
        }
        match s.split_once(':') {
            Some(("reference", e)) => e
                .parse()
                .ok()
                .filter(|e| (1..=30).contains(e))
                .map(|width_exponent| BackendSpec::Reference { width_exponent })
                .ok_or_else(|| Error::InvalidInput(format!("bad reference width exponent `{e}`"))),
            Some(("transformer", a)) if !a.is_empty() => Ok(BackendSpec::Transformer {
                artifact: a.to_owned(),
            }),
            _ => Err(Error::InvalidInput(format!("unknown backend `{s}`"))),
        }
    }
}

/// Text encoder contract shared by the hashed reference encoder and
/// pretrained transformer adapters.
///
/// `encode` returns a feature vector of constant width and one non-negative
/// salience value per token. Backends whose salience depends on the trained
/// head receive it through `head`; before a head is attached it is `None`.
pub trait EncoderBackend<T: Scalar>: Send + Sync {
    fn spec(&self) -> BackendSpec;

    fn width(&self) -> usize;

    fn encode(&self, tokens: &TokenSequence, head: Option<&LinearHead<T>>) -> Result<Encoding<T>>;

    /// Suggested learning rate for training a linear head on this backend.
    fn default_learning_rate(&self) -> f64;
}

pub const DEFAULT_WIDTH_EXPONENT: u8 = 18;

/// Artifact directory name used by a bare `transformer` backend spec.
pub const DEFAULT_ARTIFACT: &str = "bert-base-multilingual-cased";

/// Hashed bag-of-tokens encoder: each token is hashed (64-bit FNV-1a) into
/// one of `2^width_exponent` buckets, counts accumulate and the vector is
/// L2-normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReferenceBackend {
    width_exponent: u8,
}

impl Default for ReferenceBackend {
    fn default() -> Self {
        Self {
            width_exponent: DEFAULT_WIDTH_EXPONENT,
        }
    }
}

pub fn reference_backend(width_exponent: u8) -> Result<ReferenceBackend> {
    ReferenceBackend::new(width_exponent)
}

impl ReferenceBackend {
    pub fn new(width_exponent: u8) -> Result<Self> {
        if !(1..=30).contains(&width_exponent) {
            return Err(Error::InvalidInput(format!(
                "width exponent must be within 1..=30, got {width_exponent}"
            )));
        }
        Ok(Self { width_exponent })
    }

    pub fn width_exponent(&self) -> u8 {
        self.width_exponent
    }

    pub fn bucket(&self, token: &str) -> usize {
        (fnv1a64(token.as_bytes()) & ((1u64 << self.width_exponent) - 1)) as usize
    }

    /// Raw (unnormalized) bucket counts.
    pub fn bucket_counts(&self, tokens: &TokenSequence) -> BTreeMap<usize, usize> {
        let mut counts = BTreeMap::new();
        for t in tokens.iter() {
            *counts.entry(self.bucket(t)).or_insert(0) += 1;
        }
        counts
    }
}

impl<T: Scalar> EncoderBackend<T> for ReferenceBackend {
    fn spec(&self) -> BackendSpec {
        BackendSpec::Reference {
            width_exponent: self.width_exponent,
        }
    }

    fn width(&self) -> usize {
        1 << self.width_exponent
    }

    fn encode(&self, tokens: &TokenSequence, head: Option<&LinearHead<T>>) -> Result<Encoding<T>> {
        let counts = self.bucket_counts(tokens);
        let norm = counts.values().map(|c| (c * c) as f64).sum::<f64>().sqrt();
        let entries = counts
            .iter()
            .map(|(&b, &c)| (b, T::lit(c as f64 / norm)))
            .collect::<Vec<_>>();
        let features = Features {
            width: <Self as EncoderBackend<T>>::width(self),
            entries,
        };

        let salience = match head {
            None => vec![T::one() / T::from_count(tokens.len().max(1)); tokens.len()],
            Some(head) => {
                let mut token_counts: BTreeMap<&str, usize> = BTreeMap::new();
                for t in tokens.iter() {
                    *token_counts.entry(t).or_insert(0) += 1;
                }
                tokens
                    .iter()
                    .map(|t| head.column_norm(self.bucket(t)) * T::from_count(token_counts[t]))
                    .collect()
            }
        };
        Ok(Encoding { features, salience })
    }

    fn default_learning_rate(&self) -> f64 {
        0.5
    }
}

/// 64-bit FNV-1a. Stable across platforms and releases, unlike the std hasher.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    bytes
        .iter()
        .fold(OFFSET, |h, b| (h ^ u64::from(*b)).wrapping_mul(PRIME))
}
