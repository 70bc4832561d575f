//! Labeled emotion dataset: loading, validation, stratified splitting and
//! the single-label / multi-label views used for training.
//!
//! The dataset file is comma separated with header
//! `tweet_id,label1,label2,label3`; absent labels are empty cells. Texts are
//! not part of the dataset and are attached separately by tweet id.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::io::{BufRead, Read};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of emotion classes.
pub const NUM_EMOTIONS: usize = 8;

/// Eight basic emotions, indexed 0..8 in this order everywhere in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Emotion {
    Anger = 0,
    Anticipation = 1,
    Disgust = 2,
    Fear = 3,
    Joy = 4,
    Sadness = 5,
    Surprise = 6,
    Trust = 7,
}

impl Emotion {
    pub const ALL: [Emotion; NUM_EMOTIONS] = [
        Emotion::Anger,
        Emotion::Anticipation,
        Emotion::Disgust,
        Emotion::Fear,
        Emotion::Joy,
        Emotion::Sadness,
        Emotion::Surprise,
        Emotion::Trust,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Emotion> {
        Self::ALL.get(index).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Emotion::Anger => "anger",
            Emotion::Anticipation => "anticipation",
            Emotion::Disgust => "disgust",
            Emotion::Fear => "fear",
            Emotion::Joy => "joy",
            Emotion::Sadness => "sadness",
            Emotion::Surprise => "surprise",
            Emotion::Trust => "trust",
        }
    }
}

impl fmt::Display for Emotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Emotion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let needle = s.trim().to_lowercase();
        Emotion::ALL
            .into_iter()
            .find(|e| e.name() == needle)
            .ok_or_else(|| Error::InvalidInput(format!("unknown emotion label `{}`", s.trim())))
    }
}

/// One dataset row: a tweet id and its 1–3 distinct labels, primary first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledExample {
    pub tweet_id: String,
    labels: Vec<Emotion>,
    pub text: Option<String>,
}

impl LabeledExample {
    pub fn new(tweet_id: impl Into<String>, labels: Vec<Emotion>) -> Result<Self> {
        let tweet_id = tweet_id.into();
        if tweet_id.trim().is_empty() {
            return Err(Error::InvalidInput("empty tweet id".into()));
        }
        if labels.is_empty() || labels.len() > 3 {
            return Err(Error::InvalidInput(format!(
                "expected 1 to 3 labels, found {}",
                labels.len()
            )));
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(*l) {
                return Err(Error::InvalidInput(format!("duplicate label `{l}`")));
            }
        }
        Ok(Self {
            tweet_id,
            labels,
            text: None,
        })
    }

    pub fn with_text(mut self, text: impl Into<String>) -> Self {
        self.text = Some(text.into());
        self
    }

    pub fn labels(&self) -> &[Emotion] {
        &self.labels
    }

    pub fn primary(&self) -> Emotion {
        self.labels[0]
    }
}

/// A dataset row that failed validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowDiagnostic {
    /// 1-based line number in the source, header included.
    pub row: usize,
    pub message: String,
}

impl fmt::Display for RowDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "row {}: {}", self.row, self.message)
    }
}

#[derive(Debug, Clone, Default)]
pub struct LoadedCorpus {
    pub examples: Vec<LabeledExample>,
    pub rejected: Vec<RowDiagnostic>,
}

/// Reads the labeled dataset and attaches texts from `text_resolver` where
/// available. Invalid rows are collected in `rejected`; an input without any
/// data rows is an error.
pub fn load_emoct<R: Read>(
    source: R,
    text_resolver: Option<&HashMap<String, String>>,
) -> Result<LoadedCorpus> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source);

    let mut out = LoadedCorpus::default();
    let mut rows = 0usize;
    for (i, record) in reader.records().enumerate() {
        let row = i + 2;
        rows += 1;
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                out.rejected.push(RowDiagnostic {
                    row,
                    message: e.to_string(),
                });
                continue;
            }
        };
        match parse_row(&record) {
            Ok(mut ex) => {
                if let Some(text) = text_resolver.and_then(|m| m.get(&ex.tweet_id)) {
                    ex.text = Some(text.clone());
                }
                out.examples.push(ex);
            }
            Err(message) => out.rejected.push(RowDiagnostic { row, message }),
        }
    }
    if rows == 0 {
        return Err(Error::Empty("labeled dataset has no rows"));
    }
    Ok(out)
}

fn parse_row(record: &csv::StringRecord) -> std::result::Result<LabeledExample, String> {
    let mut fields = record.iter();
    let id = fields.next().unwrap_or("").trim();
    if id.is_empty() {
        return Err("missing tweet_id".into());
    }
    let mut labels = Vec::new();
    for cell in fields.filter(|c| !c.trim().is_empty()) {
        let label = cell
            .parse::<Emotion>()
            .map_err(|_| format!("unknown emotion label `{}` for tweet {id}", cell.trim()))?;
        labels.push(label);
    }
    LabeledExample::new(id, labels).map_err(|e| format!("tweet {id}: {e}"))
}

/// Reads line-delimited `{"id": ..., "text": ...}` records into an id → text
/// map. Tweet-archive lines (`id_str`, `full_text`) are accepted too. Blank
/// or unparseable lines are ignored.
pub fn load_text_resolver<R: BufRead>(source: R) -> Result<HashMap<String, String>> {
    let mut map = HashMap::new();
    for line in source.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let Ok(value) = serde_json::from_str::<serde_json::Value>(&line) else {
            continue;
        };
        let id = ["id", "id_str", "tweet_id"]
            .iter()
            .find_map(|k| match value.get(*k) {
                Some(serde_json::Value::String(s)) => Some(s.clone()),
                Some(serde_json::Value::Number(n)) => Some(n.to_string()),
                _ => None,
            });
        let text = ["full_text", "text"]
            .iter()
            .find_map(|k| value.get(*k).and_then(|v| v.as_str()).map(str::to_owned));
        if let (Some(id), Some(text)) = (id, text) {
            map.entry(id).or_insert(text);
        }
    }
    Ok(map)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CorpusSplit {
    pub train: Vec<LabeledExample>,
    pub test: Vec<LabeledExample>,
}

/// Stratified split on the primary label: for every emotion a seeded shuffle
/// of its stratum contributes `per_emotion_train` examples to train and the
/// next `per_emotion_test` to test. Leftover examples are dropped.
pub fn split_train_test(
    examples: &[LabeledExample],
    per_emotion_train: usize,
    per_emotion_test: usize,
    seed: u64,
) -> Result<CorpusSplit> {
    let mut strata: BTreeMap<Emotion, Vec<&LabeledExample>> = BTreeMap::new();
    let mut seen = HashSet::new();
    for ex in examples {
        if !seen.insert(ex.tweet_id.as_str()) {
            return Err(Error::InvalidInput(format!(
                "duplicate tweet id `{}`",
                ex.tweet_id
            )));
        }
        strata.entry(ex.primary()).or_default().push(ex);
    }

    let required = per_emotion_train + per_emotion_test;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut split = CorpusSplit::default();
    for emotion in Emotion::ALL {
        let mut stratum = strata.remove(&emotion).unwrap_or_default();
        if stratum.len() < required {
            return Err(Error::InsufficientStratum {
                emotion,
                available: stratum.len(),
                required,
            });
        }
        stratum.shuffle(&mut rng);
        split
            .train
            .extend(stratum[..per_emotion_train].iter().map(|e| (*e).clone()));
        split.test.extend(
            stratum[per_emotion_train..required]
                .iter()
                .map(|e| (*e).clone()),
        );
    }
    Ok(split)
}

/// Training pairs plus the number of examples skipped for lack of text.
#[derive(Debug, Clone, PartialEq)]
pub struct View<L> {
    pub pairs: Vec<(String, L)>,
    pub skipped: usize,
}

pub type SingleLabelView = View<Emotion>;
pub type MultiLabelView = View<[bool; NUM_EMOTIONS]>;

/// Keeps only the primary label of each example.
pub fn single_label_view(examples: &[LabeledExample]) -> SingleLabelView {
    view(examples, |ex| ex.primary())
}

/// Binary indicator vector over the canonical emotion order.
pub fn multi_label_view(examples: &[LabeledExample]) -> MultiLabelView {
    view(examples, |ex| label_vector(ex.labels()))
}

pub fn label_vector(labels: &[Emotion]) -> [bool; NUM_EMOTIONS] {
    let mut v = [false; NUM_EMOTIONS];
    for l in labels {
        v[l.index()] = true;
    }
    v
}

pub fn labels_from_vector(v: &[bool; NUM_EMOTIONS]) -> Vec<Emotion> {
    Emotion::ALL.into_iter().filter(|e| v[e.index()]).collect()
}

fn view<L>(examples: &[LabeledExample], label: impl Fn(&LabeledExample) -> L) -> View<L> {
    let mut pairs = Vec::with_capacity(examples.len());
    let mut skipped = 0;
    for ex in examples {
        match ex.text.as_deref().filter(|t| !t.trim().is_empty()) {
            Some(text) => pairs.push((text.to_owned(), label(ex))),
            None => skipped += 1,
        }
    }
    View { pairs, skipped }
}
