//! Keyword mining over classified tweets: the salience method (top-k salient
//! tokens per tweet, ranked by frequency) and the part-of-speech method
//! (noun runs, ranked by frequency). Frequencies count tweets, not
//! occurrences.

mod tagger;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::io::{self, BufRead, Write};

pub use tagger::{lexicon_tagger, LexiconTagger, PosTag, PosTagger};

use crate::corpus::Emotion;
use crate::error::Result;
use crate::scalar::Scalar;
use crate::text::TokenSequence;

pub const DEFAULT_TOP_K: usize = 3;
pub const DEFAULT_TABLE_SIZE: usize = 500;
pub const DEFAULT_EMOTIONS: [Emotion; 2] = [Emotion::Fear, Emotion::Sadness];

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Stopwords(HashSet<String>);

impl Stopwords {
    pub fn english() -> Self {
        Self::parse(include_str!("english_stopwords.txt"))
    }

    pub fn none() -> Self {
        Self::default()
    }

    pub fn from_reader<R: BufRead>(reader: R) -> Result<Self> {
        let mut words = HashSet::new();
        for line in reader.lines() {
            let line = line?;
            let w = line.trim();
            if !w.is_empty() && !w.starts_with('#') {
                words.insert(w.to_lowercase());
            }
        }
        Ok(Self(words))
    }

    fn parse(src: &str) -> Self {
        Self::from_reader(src.as_bytes()).expect("in-memory read")
    }

    pub fn contains(&self, token: &str) -> bool {
        self.0.contains(&token.to_lowercase())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<S: Into<String>> FromIterator<S> for Stopwords {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Self(iter.into_iter().map(|s| s.into().to_lowercase()).collect())
    }
}

/// When stopwords are removed in the salience method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StopwordStage {
    /// Stopwords are ineligible for top-k selection.
    #[default]
    BeforeSelection,
    /// Selection sees every token; stopword terms are dropped from the
    /// aggregated table.
    AfterAggregation,
}

/// Ranked `(term, frequency)` pairs: frequencies positive and non-increasing,
/// ties ordered by term.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KeywordTable {
    entries: Vec<(String, u64)>,
}

impl KeywordTable {
    /// Ranks raw counts and keeps the top `limit`. Zero counts are dropped.
    pub fn from_counts(counts: BTreeMap<String, u64>, limit: usize) -> Self {
        let mut entries: Vec<_> = counts.into_iter().filter(|(_, c)| *c > 0).collect();
        entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        entries.truncate(limit);
        Self { entries }
    }

    pub fn entries(&self) -> &[(String, u64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn frequency(&self, term: &str) -> Option<u64> {
        self.entries
            .iter()
            .find(|(t, _)| t == term)
            .map(|(_, f)| *f)
    }

    /// 0-based position of `term`.
    pub fn rank(&self, term: &str) -> Option<usize> {
        self.entries.iter().position(|(t, _)| t == term)
    }

    pub fn total(&self) -> u64 {
        self.entries.iter().map(|(_, f)| f).sum()
    }

    /// Adds frequencies term-wise and re-ranks. Exact only when neither
    /// side was truncated.
    pub fn merge(&self, other: &KeywordTable, limit: usize) -> KeywordTable {
        let mut counts: BTreeMap<String, u64> = BTreeMap::new();
        for (t, f) in self.entries.iter().chain(&other.entries) {
            *counts.entry(t.clone()).or_default() += f;
        }
        Self::from_counts(counts, limit)
    }

    /// `term<TAB>frequency` lines.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (t, f) in &self.entries {
            writeln!(out, "{t}\t{f}")?;
        }
        Ok(())
    }
}

/// The `k` distinct non-stopword tokens with the largest salience. Ties go
/// to the earlier position; a repeated token is judged by its first
/// occurrence with the highest salience.
pub fn top_salient_tokens<T: Scalar>(
    tokens: &TokenSequence,
    salience: &[T],
    k: usize,
    stopwords: &Stopwords,
) -> Vec<String> {
    let mut candidates: Vec<(usize, T)> = Vec::new();
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    for (pos, (tok, s)) in tokens.iter().zip(salience).enumerate() {
        if stopwords.contains(tok) {
            continue;
        }
        match seen.get(tok) {
            Some(&slot) => {
                if *s > candidates[slot].1 {
                    candidates[slot].1 = *s;
                }
            }
            None => {
                seen.insert(tok, candidates.len());
                candidates.push((pos, *s));
            }
        }
    }
    candidates.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.0.cmp(&b.0))
    });
    candidates
        .into_iter()
        .take(k)
        .map(|(pos, _)| tokens.tokens[pos].clone())
        .collect()
}

/// A classified tweet with per-token salience.
#[derive(Debug, Clone, Copy)]
pub struct SalientTweet<'a, T> {
    pub label: Emotion,
    pub tokens: &'a TokenSequence,
    pub salience: &'a [T],
}

#[derive(Debug, Clone)]
pub struct SalienceOptions<'a> {
    pub emotions: &'a [Emotion],
    pub k: usize,
    pub limit: usize,
    pub stopwords: &'a Stopwords,
    pub stage: StopwordStage,
}

/// Frequency of a term = number of tweets (labeled with one of
/// `opts.emotions`) whose top-k salient tokens include it.
pub fn salience_keyword_table<'a, T: Scalar>(
    tweets: impl IntoIterator<Item = SalientTweet<'a, T>>,
    opts: &SalienceOptions<'_>,
) -> KeywordTable {
    let none = Stopwords::none();
    let selection_stopwords = match opts.stage {
        StopwordStage::BeforeSelection => opts.stopwords,
        StopwordStage::AfterAggregation => &none,
    };
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for tweet in tweets
        .into_iter()
        .filter(|t| opts.emotions.contains(&t.label))
    {
        for tok in top_salient_tokens(tweet.tokens, tweet.salience, opts.k, selection_stopwords) {
            *counts.entry(tok).or_default() += 1;
        }
    }
    if opts.stage == StopwordStage::AfterAggregation {
        counts.retain(|t, _| !opts.stopwords.contains(t));
    }
    KeywordTable::from_counts(counts, opts.limit)
}

/// Maximal runs of NOUN/PROPN tokens, joined with single spaces.
pub fn extract_noun_phrases(tokens: &TokenSequence, tags: &[PosTag]) -> Vec<String> {
    let mut phrases = Vec::new();
    let mut run: Vec<&str> = Vec::new();
    for (tok, tag) in tokens.iter().zip(tags) {
        if tag.is_nominal() {
            run.push(tok);
        } else if !run.is_empty() {
            phrases.push(run.join(" "));
            run.clear();
        }
    }
    if !run.is_empty() {
        phrases.push(run.join(" "));
    }
    phrases
}

/// A classified tweet for the part-of-speech method.
#[derive(Debug, Clone, Copy)]
pub struct TaggableTweet<'a> {
    pub label: Emotion,
    pub lang: &'a str,
    pub tokens: &'a TokenSequence,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PosKeywordOutcome {
    pub table: KeywordTable,
    /// Tweets whose language the tagger does not support.
    pub skipped: usize,
}

/// Frequency of a phrase = number of selected tweets containing it at least
/// once. Phrases made only of stopwords are dropped.
pub fn pos_keyword_table<'a>(
    tweets: impl IntoIterator<Item = TaggableTweet<'a>>,
    tagger: &dyn PosTagger,
    emotions: &[Emotion],
    limit: usize,
    stopwords: &Stopwords,
) -> PosKeywordOutcome {
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    let mut skipped = 0;
    for tweet in tweets.into_iter().filter(|t| emotions.contains(&t.label)) {
        if !tagger.supports(tweet.lang) {
            skipped += 1;
            continue;
        }
        let tags = tagger.tag(tweet.tokens);
        let phrases: BTreeSet<String> = extract_noun_phrases(tweet.tokens, &tags)
            .into_iter()
            .filter(|p| !p.split(' ').all(|w| stopwords.contains(w)))
            .collect();
        for p in phrases {
            *counts.entry(p).or_default() += 1;
        }
    }
    PosKeywordOutcome {
        table: KeywordTable::from_counts(counts, limit),
        skipped,
    }
}
