//! Tweet archive replay: line-delimited tweet objects (optionally gzipped),
//! language / country statistics and keyword filtering.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use chrono::{DateTime, NaiveDate, Utc};
use flate2::read::MultiGzDecoder;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::text::is_cjk;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TweetRecord {
    pub id: String,
    pub text: String,
    pub lang: String,
    pub country: Option<String>,
    pub created_at: NaiveDate,
}

impl TweetRecord {
    /// Serializes back into a tweet-object line that [`parse_tweet_stream`]
    /// accepts.
    pub fn to_json_line(&self) -> String {
        let mut obj = serde_json::json!({
            "id_str": self.id,
            "text": self.text,
            "lang": self.lang,
            "created_at": self.created_at.format("%Y-%m-%d").to_string(),
        });
        if let Some(c) = &self.country {
            obj["place"] = serde_json::json!({ "country_code": c });
        }
        obj.to_string()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestStats {
    pub total: u64,
    pub parsed: u64,
    pub malformed: u64,
    pub by_lang: BTreeMap<String, u64>,
    pub by_country: BTreeMap<String, u64>,
    pub missing_geo: u64,
}

impl IngestStats {
    /// Element-wise sum. Associative and commutative, so shards may be
    /// aggregated in any order.
    pub fn merge(mut self, other: &IngestStats) -> IngestStats {
        self.total += other.total;
        self.parsed += other.parsed;
        self.malformed += other.malformed;
        self.missing_geo += other.missing_geo;
        for (k, v) in &other.by_lang {
            *self.by_lang.entry(k.clone()).or_default() += v;
        }
        for (k, v) in &other.by_country {
            *self.by_country.entry(k.clone()).or_default() += v;
        }
        self
    }

    pub fn is_consistent(&self) -> bool {
        self.parsed + self.malformed == self.total
            && self.by_lang.values().sum::<u64>() == self.parsed
            && self.by_country.values().sum::<u64>() + self.missing_geo == self.parsed
    }
}

/// Opens a tweet archive, transparently decompressing gzip input.
pub fn open_archive(path: impl AsRef<Path>) -> Result<Box<dyn BufRead>> {
    let mut file = BufReader::new(File::open(path)?);
    let gzipped = file.fill_buf()?.starts_with(&[0x1f, 0x8b]);
    Ok(if gzipped {
        Box::new(BufReader::new(MultiGzDecoder::new(file)))
    } else {
        Box::new(file)
    })
}

/// Parses one tweet per line. Bad lines are counted as malformed and
/// skipped; only a read failure of the source itself is an error.
pub fn parse_tweet_stream<R: BufRead>(source: R) -> Result<(Vec<TweetRecord>, IngestStats)> {
    let mut records = Vec::new();
    let mut stats = IngestStats::default();
    let mut ids = HashSet::new();
    for line in source.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        stats.total += 1;
        match parse_tweet(&line) {
            Some(rec) if ids.insert(rec.id.clone()) => records.push(rec),
            _ => stats.malformed += 1,
        }
    }
    let counted = compute_stats(&records);
    stats.parsed = counted.parsed;
    stats.by_lang = counted.by_lang;
    stats.by_country = counted.by_country;
    stats.missing_geo = counted.missing_geo;
    Ok((records, stats))
}

/// Parses a single serialized tweet object; `None` when it is malformed.
pub fn parse_tweet(line: &str) -> Option<TweetRecord> {
    let v: Value = serde_json::from_str(line).ok()?;
    let id = match v.get("id_str").or_else(|| v.get("id"))? {
        Value::String(s) => s.trim().to_owned(),
        Value::Number(n) => n.to_string(),
        _ => return None,
    };
    if id.is_empty() {
        return None;
    }
    let text = v
        .get("full_text")
        .and_then(Value::as_str)
        .or_else(|| v.get("text").and_then(Value::as_str))?;
    if text.trim().is_empty() {
        return None;
    }
    let created_at = parse_created_at(v.get("created_at")?.as_str()?)?;
    let lang = v
        .get("lang")
        .and_then(Value::as_str)
        .filter(|s| !s.trim().is_empty())
        .unwrap_or("und")
        .to_owned();
    let country = v
        .get("place")
        .and_then(|p| p.get("country_code"))
        .and_then(Value::as_str)
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_uppercase);
    Some(TweetRecord {
        id,
        text: text.to_owned(),
        lang,
        country,
        created_at,
    })
}

/// Accepts the classic archive layout `Wed Mar 25 10:00:00 +0000 2020`,
/// RFC 3339 timestamps and bare `YYYY-MM-DD` dates. The result is the UTC day.
pub fn parse_created_at(s: &str) -> Option<NaiveDate> {
    let s = s.trim();
    if let Ok(dt) = DateTime::parse_from_str(s, "%a %b %d %H:%M:%S %z %Y") {
        return Some(dt.with_timezone(&Utc).date_naive());
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(dt.with_timezone(&Utc).date_naive());
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d").ok()
}

pub fn compute_stats(records: &[TweetRecord]) -> IngestStats {
    let mut stats = IngestStats::default();
    for r in records {
        stats.total += 1;
        stats.parsed += 1;
        *stats.by_lang.entry(r.lang.clone()).or_default() += 1;
        match &r.country {
            Some(c) => *stats.by_country.entry(c.clone()).or_default() += 1,
            None => stats.missing_geo += 1,
        }
    }
    stats
}

/// Writes `key<TAB>count` lines, descending by count, ties by key.
pub fn write_counts<W: Write>(counts: &BTreeMap<String, u64>, mut out: W) -> io::Result<()> {
    let mut rows: Vec<_> = counts.iter().collect();
    rows.sort_by(|a, b| b.1.cmp(a.1).then_with(|| a.0.cmp(b.0)));
    for (k, v) in rows {
        writeln!(out, "{k}\t{v}")?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchPolicy {
    /// Case-insensitive match delimited by non-letters or string edges.
    WordBoundary,
    /// Case-insensitive containment.
    Substring,
    /// Substring for keywords containing CJK codepoints, word boundary otherwise.
    #[default]
    Auto,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeywordQuery {
    keywords: Vec<(String, MatchPolicy)>,
}

impl KeywordQuery {
    pub fn new<S: AsRef<str>>(keywords: &[S], policy: MatchPolicy) -> Result<Self> {
        if keywords.is_empty() {
            return Err(Error::InvalidInput("keyword list is empty".into()));
        }
        let keywords = keywords
            .iter()
            .map(|k| {
                let k = k.as_ref().trim().to_lowercase();
                if k.is_empty() {
                    return Err(Error::InvalidInput("empty keyword".into()));
                }
                let resolved = match policy {
                    MatchPolicy::Auto if k.chars().any(is_cjk) => MatchPolicy::Substring,
                    MatchPolicy::Auto => MatchPolicy::WordBoundary,
                    p => p,
                };
                Ok((k, resolved))
            })
            .collect::<Result<_>>()?;
        Ok(Self { keywords })
    }

    pub fn keywords(&self) -> impl Iterator<Item = (&str, MatchPolicy)> {
        self.keywords.iter().map(|(k, p)| (k.as_str(), *p))
    }

    pub fn matches(&self, text: &str) -> bool {
        let lower = text.to_lowercase();
        self.keywords.iter().any(|(k, policy)| match policy {
            MatchPolicy::Substring => lower.contains(k.as_str()),
            _ => contains_word(&lower, k),
        })
    }
}

fn contains_word(haystack: &str, needle: &str) -> bool {
    haystack.match_indices(needle).any(|(start, m)| {
        let before = haystack[..start].chars().next_back();
        let after = haystack[start + m.len()..].chars().next();
        !before.is_some_and(char::is_alphabetic) && !after.is_some_and(char::is_alphabetic)
    })
}

/// Records whose text matches any keyword, in input order.
pub fn filter_by_keywords(records: &[TweetRecord], query: &KeywordQuery) -> Vec<TweetRecord> {
    records
        .iter()
        .filter(|r| query.matches(&r.text))
        .cloned()
        .collect()
}
