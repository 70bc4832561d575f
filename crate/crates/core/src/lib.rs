//! Emotion analysis for short social-media posts.
//!
//! * [`ingest`]: tweet archive replay, language/country statistics, keyword filters.
//! * [`corpus`]: the eight-emotion labeled dataset, stratified splits, label views.
//! * [`classify`]: single- and multi-label linear heads over a pluggable encoder.
//! * [`metrics`]: accuracy, F1, label-ranking metrics and AUROC.
//! * [`keywords`]: salience and noun-phrase keyword tables.
//! * [`trends`]: daily emotion distributions, variance ranking, spike detection.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix it to `f64`, which is what the file formats store.

pub mod classify;
pub mod corpus;
pub mod error;
pub mod ingest;
pub mod keywords;
pub mod metrics;
pub mod predictions;
mod scalar;
pub mod synthetic;
pub mod text;
pub mod trends;

pub use corpus::{Emotion, LabeledExample, NUM_EMOTIONS};
pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Model = classify::TrainedModel<f64>;
pub type Scores = classify::EmotionScores<f64>;
pub type Instance = metrics::RankedInstance<f64>;
pub type Series = trends::TrendSeries<f64>;
pub type Daily = trends::DailyDistribution<f64>;
pub type Spike = trends::SpikeReport<f64>;
