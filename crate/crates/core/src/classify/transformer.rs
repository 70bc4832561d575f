//! Adapter that lets an externally supplied pretrained transformer act as an
//! [`EncoderBackend`].
//!
//! No inference runtime ships with this crate. Callers implement
//! [`PretrainedEncoder`] on top of whatever runtime they use; the adapter
//! turns its raw outputs into the backend contract:
//!
//! * sequence features are the classification-position output vector;
//! * salience is the last-layer attention row of the classification query
//!   position, averaged over heads, with special positions dropped and
//!   subword pieces summed back onto the words they came from.

use std::path::{Path, PathBuf};

use crate::classify::backend::{BackendSpec, EncoderBackend, Encoding, Features};
use crate::classify::head::LinearHead;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::text::TokenSequence;

/// Environment variable naming the directory that holds pretrained artifacts.
pub const MODEL_DIR_ENV: &str = "EMOTWEET_MODEL_DIR";

/// Raw outputs of one forward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct EncoderOutput {
    /// Output vector at the classification position.
    pub pooled: Vec<f64>,
    /// For every model position, the index of the input word it belongs to;
    /// `None` for special positions such as `[CLS]` and `[SEP]`.
    pub piece_words: Vec<Option<usize>>,
    /// Last-layer attention probabilities, indexed `[head][query][key]`.
    pub attention: Vec<Vec<Vec<f64>>>,
    /// Model position of the classification query.
    pub query_position: usize,
}

pub trait PretrainedEncoder: Send + Sync {
    /// Identifier stored in model files, typically the artifact name.
    fn artifact(&self) -> &str;

    fn hidden_width(&self) -> usize;

    fn run(&self, words: &[String]) -> Result<EncoderOutput>;
}

#[derive(Debug, Clone)]
pub struct TransformerBackend<E> {
    encoder: E,
}

pub fn transformer_backend_adapter<E: PretrainedEncoder>(encoder: E) -> TransformerBackend<E> {
    TransformerBackend { encoder }
}

impl<E: PretrainedEncoder> TransformerBackend<E> {
    pub fn encoder(&self) -> &E {
        &self.encoder
    }
}

/// Resolves the artifact directory for `artifact`, from `dir` or the
/// [`MODEL_DIR_ENV`] variable.
pub fn locate_artifact(dir: Option<&Path>, artifact: &str) -> Result<PathBuf> {
    let base = match dir {
        Some(d) => d.to_path_buf(),
        None => std::env::var_os(MODEL_DIR_ENV).map(PathBuf::from).ok_or_else(|| {
            Error::BackendUnavailable(format!(
                "pretrained artifact `{artifact}` not found: set {MODEL_DIR_ENV} to the directory holding it"
            ))
        })?,
    };
    let path = base.join(artifact);
    if !path.exists() {
        return Err(Error::BackendUnavailable(format!(
            "pretrained artifact `{}` does not exist; download it there or point {MODEL_DIR_ENV} elsewhere",
            path.display()
        )));
    }
    Ok(path)
}

/// Per-word salience from last-layer attention.
pub fn aggregate_salience(output: &EncoderOutput, words: usize) -> Result<Vec<f64>> {
    let positions = output.piece_words.len();
    if output.attention.is_empty() {
        return Err(Error::InvalidInput("attention has no heads".into()));
    }
    let mut per_position = vec![0.0; positions];
    for head in &output.attention {
        let row = head
            .get(output.query_position)
            .filter(|r| r.len() == positions)
            .ok_or_else(|| {
                Error::InvalidInput("attention shape does not match the pieces".into())
            })?;
        for (acc, a) in per_position.iter_mut().zip(row) {
            *acc += a.max(0.0);
        }
    }
    let heads = output.attention.len() as f64;
    let mut salience = vec![0.0; words];
    for (pos, word) in output.piece_words.iter().enumerate() {
        if let Some(w) = word {
            let slot = salience
                .get_mut(*w)
                .ok_or_else(|| Error::InvalidInput(format!("piece maps to word {w} of {words}")))?;
            *slot += per_position[pos] / heads;
        }
    }
    Ok(salience)
}

impl<T: Scalar, E: PretrainedEncoder> EncoderBackend<T> for TransformerBackend<E> {
    fn spec(&self) -> BackendSpec {
        BackendSpec::Transformer {
            artifact: self.encoder.artifact().to_owned(),
        }
    }

    fn width(&self) -> usize {
        self.encoder.hidden_width()
    }

    fn encode(&self, tokens: &TokenSequence, _head: Option<&LinearHead<T>>) -> Result<Encoding<T>> {
        let output = self.encoder.run(&tokens.tokens)?;
        if output.pooled.len() != self.encoder.hidden_width() {
            return Err(Error::InvalidInput(
                "pooled output width changed between calls".into(),
            ));
        }
        let salience = aggregate_salience(&output, tokens.len())?
            .into_iter()
            .map(T::lit)
            .collect();
        let pooled: Vec<T> = output.pooled.iter().map(|v| T::lit(*v)).collect();
        Ok(Encoding {
            features: Features::from_dense(&pooled),
            salience,
        })
    }

    fn default_learning_rate(&self) -> f64 {
        1e-5
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::backend::ReferenceBackend;

    /// Splits every word longer than 3 characters into two pieces and
    /// attends uniformly from `[CLS]`.
    struct MockEncoder;

    impl PretrainedEncoder for MockEncoder {
        fn artifact(&self) -> &str {
            "mock"
        }

        fn hidden_width(&self) -> usize {
            4
        }

        fn run(&self, words: &[String]) -> Result<EncoderOutput> {
            let mut piece_words = vec![None];
            for (i, w) in words.iter().enumerate() {
                piece_words.push(Some(i));
                if w.chars().count() > 3 {
                    piece_words.push(Some(i));
                }
            }
            piece_words.push(None);
            let n = piece_words.len();
            let uniform = vec![1.0 / n as f64; n];
            let mut skewed = vec![0.0; n];
            skewed[1] = 1.0;
            let attention = vec![vec![uniform; n], vec![skewed; n]];
            Ok(EncoderOutput {
                pooled: vec![0.5, -0.5, 0.25, 1.0],
                piece_words,
                attention,
                query_position: 0,
            })
        }
    }

    fn words(ws: &[&str]) -> TokenSequence {
        TokenSequence::from(ws.iter().map(|s| s.to_string()).collect::<Vec<_>>())
    }

    #[test]
    fn salience_is_aggregated_per_word() {
        let backend = transformer_backend_adapter(MockEncoder);
        let toks = words(&["virus", "is", "spreading"]);
        let enc: Encoding<f64> = backend.encode(&toks, None).unwrap();
        assert_eq!(enc.salience.len(), 3);
        assert!(enc.salience.iter().all(|s| *s >= 0.0));
        let total: f64 = enc.salience.iter().sum();
        assert!(total <= 1.0 + 1e-6);
        // 7 positions; uniform head gives 1/7 per piece, skewed head all on piece 1
        assert!((enc.salience[0] - (2.0 / 7.0 + 1.0) / 2.0).abs() < 1e-12);
        assert!((enc.salience[1] - (1.0 / 7.0) / 2.0).abs() < 1e-12);
        assert_eq!(enc.features.width(), 4);
    }

    #[test]
    fn adapter_and_reference_give_same_shapes() {
        let toks = words(&["fear", "the", "virus"]);
        let t: Encoding<f64> = transformer_backend_adapter(MockEncoder)
            .encode(&toks, None)
            .unwrap();
        let r: Encoding<f64> = ReferenceBackend::new(8)
            .unwrap()
            .encode(&toks, None)
            .unwrap();
        assert_eq!(t.salience.len(), r.salience.len());
        assert_eq!(
            <TransformerBackend<MockEncoder> as EncoderBackend<f64>>::spec(
                &transformer_backend_adapter(MockEncoder)
            ),
            BackendSpec::Transformer {
                artifact: "mock".into()
            }
        );
    }

    #[test]
    fn missing_artifact_explains_how_to_enable() {
        let dir = std::env::temp_dir().join("emotweet-no-such-dir");
        let err = locate_artifact(Some(&dir), "bert").unwrap_err().to_string();
        assert!(err.contains(MODEL_DIR_ENV));
    }

    #[test]
    fn malformed_attention_is_an_error() {
        let out = EncoderOutput {
            pooled: vec![],
            piece_words: vec![None, Some(0)],
            attention: vec![vec![vec![1.0]]],
            query_position: 0,
        };
        assert!(aggregate_salience(&out, 1).is_err());
        let out = EncoderOutput {
            attention: vec![],
            ..out
        };
        assert!(aggregate_salience(&out, 1).is_err());
    }
}
