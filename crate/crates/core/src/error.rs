use std::io;

use thiserror::Error;

use crate::corpus::Emotion;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error(
        "emotion `{emotion}` has {available} examples with that primary label, {required} required"
    )]
    InsufficientStratum {
        emotion: Emotion,
        available: usize,
        required: usize,
    },

    #[error("{what} requires both positive and negative examples{}", .class.as_ref().map(|c| format!(" (class `{c}`)")).unwrap_or_default())]
    SingleClass {
        what: &'static str,
        class: Option<String>,
    },

    #[error("no usable instances for {metric}: {excluded} degenerate instance(s) excluded")]
    NoUsableInstances {
        metric: &'static str,
        excluded: usize,
    },

    #[error("non-finite training loss at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },

    #[error("model file: {0}")]
    ModelFormat(String),

    #[error("encoder backend unavailable: {0}")]
    BackendUnavailable(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
