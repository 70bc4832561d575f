//! Line-delimited prediction records, one JSON object per classified tweet.
//! Keyword and trend analyses read these instead of re-running the model.
//!
//! ```text
//! {"id":"1","date":"2020-03-25","lang":"en","text":"...","label":"fear",
//!  "scores":[8 numbers, canonical emotion order],
//!  "tokens":[...],"salience":[one per token],"salient":[top tokens]}
//! ```

use std::io::{self, BufRead, Write};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::classify::EmotionScores;
use crate::corpus::{Emotion, NUM_EMOTIONS};
use crate::error::{Error, Result};
use crate::ingest::TweetRecord;
use crate::keywords::{top_salient_tokens, SalientTweet, Stopwords, TaggableTweet, DEFAULT_TOP_K};
use crate::text::TokenSequence;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub id: String,
    pub date: NaiveDate,
    pub lang: String,
    pub text: String,
    pub label: Emotion,
    pub scores: [f64; NUM_EMOTIONS],
    pub tokens: TokenSequence,
    pub salience: Vec<f64>,
    /// Top salient non-stopword tokens under the default settings.
    pub salient: Vec<String>,
}

impl PredictionRecord {
    pub fn new(tweet: &TweetRecord, scores: EmotionScores<f64>, stopwords: &Stopwords) -> Self {
        let salient =
            top_salient_tokens(&scores.tokens, &scores.salience, DEFAULT_TOP_K, stopwords);
        Self {
            id: tweet.id.clone(),
            date: tweet.created_at,
            lang: tweet.lang.clone(),
            text: tweet.text.clone(),
            label: scores.argmax(),
            scores: scores.scores,
            tokens: scores.tokens,
            salience: scores.salience,
            salient,
        }
    }

    pub fn as_salient(&self) -> SalientTweet<'_, f64> {
        SalientTweet {
            label: self.label,
            tokens: &self.tokens,
            salience: &self.salience,
        }
    }

    pub fn as_taggable(&self) -> TaggableTweet<'_> {
        TaggableTweet {
            label: self.label,
            lang: &self.lang,
            tokens: &self.tokens,
        }
    }
}

pub fn write_predictions<'a, W: Write>(
    records: impl IntoIterator<Item = &'a PredictionRecord>,
    mut out: W,
) -> io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        writeln!(out)?;
    }
    Ok(())
}

pub fn read_predictions<R: BufRead>(input: R) -> Result<Vec<PredictionRecord>> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: PredictionRecord = serde_json::from_str(&line)
            .map_err(|e| Error::InvalidInput(format!("predictions line {}: {e}", i + 1)))?;
        if rec.salience.len() != rec.tokens.len() {
            return Err(Error::InvalidInput(format!(
                "predictions line {}: salience/token length mismatch",
                i + 1
            )));
        }
        out.push(rec);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let tweet = TweetRecord {
            id: "7".into(),
            text: "fever and the virus".into(),
            lang: "en".into(),
            country: None,
            created_at: NaiveDate::from_ymd_opt(2020, 3, 27).unwrap(),
        };
        let tokens = crate::text::tokenize(&tweet.text).unwrap();
        let scores = EmotionScores {
            tokens,
            scores: [0.1, 0.05, 0.05, 0.4, 0.1, 0.1, 0.1, 0.1],
            salience: vec![0.3, 0.9, 0.9, 0.1 / 3.0],
        };
        let rec = PredictionRecord::new(&tweet, scores, &Stopwords::english());
        assert_eq!(rec.label, Emotion::Fear);
        assert_eq!(rec.salient, ["fever", "virus"]);
        let mut buf = Vec::new();
        write_predictions([&rec, &rec], &mut buf).unwrap();
        let back = read_predictions(buf.as_slice()).unwrap();
        assert_eq!(back, vec![rec.clone(), rec]);
        assert!(read_predictions("{\"id\":1}\n".as_bytes()).is_err());
    }
}
