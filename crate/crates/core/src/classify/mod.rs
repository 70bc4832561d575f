//! Emotion classifiers: a linear head (softmax or per-label sigmoid) trained
//! by full-batch gradient descent on top of a pluggable text encoder.

pub mod backend;
pub mod head;
pub mod model_io;
#[cfg(feature = "transformer")]
pub mod transformer;

use std::sync::Arc;

use rayon::prelude::*;

pub use backend::{
    reference_backend, BackendSpec, EncoderBackend, Encoding, Features, ReferenceBackend,
};
pub use head::{HeadKind, LinearHead, Target};

use crate::corpus::{Emotion, MultiLabelView, SingleLabelView, NUM_EMOTIONS};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::text::{tokenize, TokenSequence};

pub const DEFAULT_SEED: u64 = 13;

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierConfig {
    pub head: HeadKind,
    /// `None` uses the backend's default learning rate.
    pub learning_rate: Option<f64>,
    pub epochs: usize,
    pub seed: u64,
    pub l2_penalty: f64,
    /// Probability above which a multi-head label counts as predicted.
    pub threshold: f64,
}

impl ClassifierConfig {
    pub fn for_head(head: HeadKind) -> Self {
        Self {
            head,
            learning_rate: None,
            epochs: match head {
                HeadKind::Single => 20,
                HeadKind::Multi => 10,
            },
            seed: DEFAULT_SEED,
            l2_penalty: 1e-4,
            threshold: 0.5,
        }
    }

    pub fn single() -> Self {
        Self::for_head(HeadKind::Single)
    }

    pub fn multi() -> Self {
        Self::for_head(HeadKind::Multi)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(lr) = self.learning_rate {
            if !(lr.is_finite() && lr > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "learning rate must be positive, got {lr}"
                )));
            }
        }
        if self.epochs == 0 {
            return Err(Error::InvalidInput("epochs must be positive".into()));
        }
        if !(self.l2_penalty.is_finite() && self.l2_penalty >= 0.0) {
            return Err(Error::InvalidInput(
                "l2 penalty must be non-negative".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::InvalidInput("threshold must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

/// Texts with single- or multi-label targets.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet {
    pub texts: Vec<String>,
    pub targets: Vec<Target>,
}

impl TrainingSet {
    pub fn kind(&self) -> Option<HeadKind> {
        match self.targets.first()? {
            Target::Class(_) => Some(HeadKind::Single),
            Target::Labels(_) => Some(HeadKind::Multi),
        }
    }

    pub fn len(&self) -> usize {
        self.texts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.texts.is_empty()
    }
}

impl From<&SingleLabelView> for TrainingSet {
    fn from(view: &SingleLabelView) -> Self {
        let (texts, targets) = view
            .pairs
            .iter()
            .map(|(t, e)| (t.clone(), Target::Class(e.index())))
            .unzip();
        Self { texts, targets }
    }
}

impl From<&MultiLabelView> for TrainingSet {
    fn from(view: &MultiLabelView) -> Self {
        let (texts, targets) = view
            .pairs
            .iter()
            .map(|(t, y)| (t.clone(), Target::Labels(*y)))
            .unzip();
        Self { texts, targets }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    /// Objective value at the start of each epoch.
    pub epoch_losses: Vec<f64>,
    /// Objective value after the last update.
    pub final_loss: f64,
    pub warnings: Vec<String>,
}

/// Immutable classifier: encoder, trained head and the metadata needed to
/// reproduce it.
#[derive(Clone)]
pub struct TrainedModel<T: Scalar> {
    backend: Arc<dyn EncoderBackend<T>>,
    head: LinearHead<T>,
    threshold: f64,
    seed: u64,
    epochs: usize,
    final_loss: f64,
}

impl<T: Scalar> std::fmt::Debug for TrainedModel<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TrainedModel")
            .field("backend", &self.backend.spec())
            .field("kind", &self.head.kind())
            .field("width", &self.head.width())
            .field("threshold", &self.threshold)
            .field("seed", &self.seed)
            .field("epochs", &self.epochs)
            .finish()
    }
}

impl<T: Scalar> TrainedModel<T> {
    pub(crate) fn from_parts(
        backend: Arc<dyn EncoderBackend<T>>,
        head: LinearHead<T>,
        threshold: f64,
        seed: u64,
        epochs: usize,
        final_loss: f64,
    ) -> Result<Self> {
        if backend.width() != head.width() {
            return Err(Error::ModelFormat(format!(
                "backend width {} does not match head width {}",
                backend.width(),
                head.width()
            )));
        }
        Ok(Self {
            backend,
            head,
            threshold,
            seed,
            epochs,
            final_loss,
        })
    }

    pub fn backend(&self) -> &dyn EncoderBackend<T> {
        self.backend.as_ref()
    }

    pub fn head(&self) -> &LinearHead<T> {
        &self.head
    }

    pub fn kind(&self) -> HeadKind {
        self.head.kind()
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn epochs(&self) -> usize {
        self.epochs
    }

    pub fn final_loss(&self) -> f64 {
        self.final_loss
    }
}

/// Trains a linear head on frozen encoder features.
pub fn train<T: Scalar>(
    data: &TrainingSet,
    backend: Arc<dyn EncoderBackend<T>>,
    config: &ClassifierConfig,
) -> Result<(TrainedModel<T>, TrainReport)> {
    config.validate()?;
    if data.is_empty() {
        return Err(Error::Empty("training view"));
    }
    if data.kind() != Some(config.head)
        || data.targets.iter().any(|t| target_kind(t) != config.head)
    {
        return Err(Error::InvalidInput(format!(
            "training targets do not match a {} head",
            config.head
        )));
    }
    let mut warnings = Vec::new();
    match config.head {
        HeadKind::Single => {
            let mut seen = [false; NUM_EMOTIONS];
            for t in &data.targets {
                if let Target::Class(k) = t {
                    seen[*k] = true;
                }
            }
            if seen.iter().filter(|s| **s).count() < 2 {
                return Err(Error::InvalidInput(
                    "single-label training needs at least 2 distinct labels".into(),
                ));
            }
        }
        HeadKind::Multi => {
            for e in Emotion::ALL {
                let positives = data
                    .targets
                    .iter()
                    .filter(|t| matches!(t, Target::Labels(y) if y[e.index()]))
                    .count();
                if positives == 0 {
                    warnings.push(format!("no positive examples for `{e}`"));
                }
            }
        }
    }

    let encoded = encode_all(data, backend.as_ref())?;
    let width = backend.width();
    let lr = T::lit(
        config
            .learning_rate
            .unwrap_or_else(|| backend.default_learning_rate()),
    );
    let l2 = T::lit(config.l2_penalty);

    // the objective is convex, so a zero start needs no symmetry breaking
    let mut head = LinearHead::zeros(config.head, width);

    let mut epoch_losses = Vec::with_capacity(config.epochs);
    for epoch in 1..=config.epochs {
        let obj = head::objective(&head, &encoded, l2);
        if !obj.loss.is_finite() {
            return Err(Error::NonFiniteLoss { epoch });
        }
        epoch_losses.push(obj.loss.as_f64());
        for (w, g) in head.weights_mut().iter_mut().zip(&obj.weight_grad) {
            if !g.is_zero() {
                *w -= lr * *g;
            }
        }
        for (b, g) in head.bias_mut().iter_mut().zip(&obj.bias_grad) {
            *b -= lr * *g;
        }
    }
    let final_loss = head::objective(&head, &encoded, l2).loss;
    if !final_loss.is_finite() {
        return Err(Error::NonFiniteLoss {
            epoch: config.epochs,
        });
    }
    let final_loss = final_loss.as_f64();

    let model = TrainedModel::from_parts(
        backend,
        head,
        config.threshold,
        config.seed,
        config.epochs,
        final_loss,
    )?;
    Ok((
        model,
        TrainReport {
            epoch_losses,
            final_loss,
            warnings,
        },
    ))
}

fn target_kind(t: &Target) -> HeadKind {
    match t {
        Target::Class(_) => HeadKind::Single,
        Target::Labels(_) => HeadKind::Multi,
    }
}

/// Encodes every training text; texts that tokenize to nothing get an empty
/// feature vector.
pub fn encode_all<T: Scalar>(
    data: &TrainingSet,
    backend: &dyn EncoderBackend<T>,
) -> Result<Vec<(Features<T>, Target)>> {
    data.texts
        .iter()
        .zip(&data.targets)
        .map(|(text, target)| {
            let tokens = tokenize(text)?;
            Ok((backend.encode(&tokens, None)?.features, *target))
        })
        .collect()
}

/// Per-emotion scores for one text together with its tokens and their salience.
#[derive(Debug, Clone, PartialEq)]
pub struct EmotionScores<T> {
    pub tokens: TokenSequence,
    pub scores: [T; NUM_EMOTIONS],
    pub salience: Vec<T>,
}

impl<T: Scalar> EmotionScores<T> {
    /// Highest-scoring emotion; ties go to the lowest canonical index.
    pub fn argmax(&self) -> Emotion {
        argmax(&self.scores)
    }

    /// Emotions whose score is strictly above `threshold`.
    pub fn predicted_labels(&self, threshold: f64) -> Vec<Emotion> {
        Emotion::ALL
            .into_iter()
            .filter(|e| self.scores[e.index()].as_f64() > threshold)
            .collect()
    }
}

pub fn argmax<T: Scalar>(scores: &[T; NUM_EMOTIONS]) -> Emotion {
    let mut best = 0;
    for i in 1..NUM_EMOTIONS {
        if scores[i] > scores[best] {
            best = i;
        }
    }
    Emotion::ALL[best]
}

pub fn predict<T: Scalar>(model: &TrainedModel<T>, text: &str) -> Result<EmotionScores<T>> {
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err(Error::InvalidInput("text has no tokens".into()));
    }
    let enc = model.backend.encode(&tokens, Some(&model.head))?;
    debug_assert_eq!(enc.salience.len(), tokens.len());
    let scores = model.head.probabilities(&enc.features);
    Ok(EmotionScores {
        tokens,
        scores,
        salience: enc.salience,
    })
}

/// Order-preserving parallel prediction.
pub fn predict_batch<T: Scalar, S: AsRef<str> + Sync>(
    model: &TrainedModel<T>,
    texts: &[S],
) -> Vec<Result<EmotionScores<T>>> {
    texts
        .par_iter()
        .map(|t| predict(model, t.as_ref()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> TrainingSet {
        let a = ["alpha", "apple", "amber", "arrow"];
        let b = ["bravo", "banana", "beryl", "bison"];
        let mut texts = Vec::new();
        let mut targets = Vec::new();
        for i in 0..10 {
            texts.push(format!("{} {} the", a[i % 4], a[(i + 1) % 4]));
            targets.push(Target::Class(Emotion::Fear.index()));
            texts.push(format!("{} {} the", b[i % 4], b[(i + 2) % 4]));
            targets.push(Target::Class(Emotion::Joy.index()));
        }
        TrainingSet { texts, targets }
    }

    fn backend() -> Arc<dyn EncoderBackend<f64>> {
        Arc::new(ReferenceBackend::new(12).unwrap())
    }

    #[test]
    fn config_defaults() {
        let s = ClassifierConfig::single();
        assert_eq!(
            (s.epochs, s.seed, s.l2_penalty, s.threshold),
            (20, 13, 1e-4, 0.5)
        );
        assert_eq!(ClassifierConfig::multi().epochs, 10);
        let mut bad = ClassifierConfig::single();
        bad.learning_rate = Some(0.0);
        assert!(bad.validate().is_err());
        bad = ClassifierConfig::single();
        bad.epochs = 0;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn empty_and_mismatched_views_are_rejected() {
        let empty = TrainingSet {
            texts: vec![],
            targets: vec![],
        };
        assert!(matches!(
            train(&empty, backend(), &ClassifierConfig::single()),
            Err(Error::Empty(_))
        ));
        assert!(train(&toy(), backend(), &ClassifierConfig::multi()).is_err());

        let one_class = TrainingSet {
            texts: vec!["a".into(), "b".into()],
            targets: vec![Target::Class(1), Target::Class(1)],
        };
        assert!(train(&one_class, backend(), &ClassifierConfig::single()).is_err());
    }

    #[test]
    fn diverging_training_reports_epoch() {
        let mut cfg = ClassifierConfig::single();
        cfg.learning_rate = Some(1e308);
        cfg.epochs = 10;
        match train(&toy(), backend(), &cfg) {
            Err(Error::NonFiniteLoss { epoch }) => assert!(epoch >= 2),
            other => panic!("expected non-finite loss, got {:?}", other.map(|m| m.1)),
        }
    }

    #[test]
    fn multi_head_warns_on_missing_positives() {
        let data = TrainingSet {
            texts: vec!["scared".into(), "happy".into()],
            targets: vec![
                Target::Labels(crate::corpus::label_vector(&[Emotion::Fear])),
                Target::Labels(crate::corpus::label_vector(&[Emotion::Joy])),
            ],
        };
        let (_, report) = train(&data, backend(), &ClassifierConfig::multi()).unwrap();
        assert_eq!(report.warnings.len(), 6);
    }

    #[test]
    fn argmax_breaks_ties_toward_lower_index() {
        let s = [0.1, 0.3, 0.3, 0.0, 0.0, 0.3, 0.0, 0.0f64];
        assert_eq!(argmax(&s), Emotion::Anticipation);
    }

    #[test]
    fn punctuation_only_text_cannot_be_predicted() {
        let (model, _) = train(&toy(), backend(), &ClassifierConfig::single()).unwrap();
        assert!(predict(&model, "?!").is_err());
        assert!(predict(&model, "").is_err());
    }

    #[test]
    fn batch_prediction_preserves_order() {
        let (model, _) = train(&toy(), backend(), &ClassifierConfig::single()).unwrap();
        let texts = ["alpha apple", "bravo bison", "amber", "banana beryl"];
        let batch = predict_batch(&model, &texts);
        for (t, r) in texts.iter().zip(batch) {
            assert_eq!(r.unwrap(), predict(&model, t).unwrap());
        }
    }

    #[test]
    fn multi_head_predicted_labels_use_threshold() {
        let s = EmotionScores::<f64> {
            tokens: TokenSequence::default(),
            scores: [0.9, 0.2, 0.5, 0.6, 0.0, 0.0, 0.0, 0.51],
            salience: vec![],
        };
        assert_eq!(
            s.predicted_labels(0.5),
            vec![Emotion::Anger, Emotion::Fear, Emotion::Trust]
        );
    }
}
