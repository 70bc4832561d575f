//! Fixture files and a thin wrapper around the built binary.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use chrono::{Days, NaiveDate};
use emotweet::ingest::TweetRecord;
use emotweet::synthetic::{dataset_csv, synthetic_corpus, texts_jsonl, CorpusOptions};
use emotweet::LabeledExample;

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_emotweet"))
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn emotweet")
}

pub fn run_ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "emotweet {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

pub struct Dataset {
    pub examples: Vec<LabeledExample>,
    pub csv: PathBuf,
    pub texts: PathBuf,
}

pub fn write_dataset(dir: &Path, opts: &CorpusOptions) -> Dataset {
    let examples = synthetic_corpus(opts);
    let csv = dir.join("dataset.csv");
    let texts = dir.join("texts.jsonl");
    std::fs::write(&csv, dataset_csv(&examples)).unwrap();
    std::fs::write(&texts, texts_jsonl(&examples)).unwrap();
    Dataset {
        examples,
        csv,
        texts,
    }
}

pub fn start() -> NaiveDate {
    NaiveDate::from_ymd_opt(2020, 3, 25).unwrap()
}

/// Tweets carrying the labeled texts, spread over `days` days.
pub fn tweets_from(examples: &[LabeledExample], days: u64) -> Vec<TweetRecord> {
    examples
        .iter()
        .enumerate()
        .map(|(i, ex)| TweetRecord {
            id: format!("{}", 9_000_000 + i),
            text: ex.text.clone().unwrap(),
            lang: if i % 5 == 0 { "es".into() } else { "en".into() },
            country: (i % 3 != 0).then(|| "US".into()),
            created_at: start() + Days::new(i as u64 % days),
        })
        .collect()
}

pub fn write_archive(path: &Path, tweets: &[TweetRecord]) {
    let body: String = tweets.iter().map(|t| t.to_json_line() + "\n").collect();
    std::fs::write(path, body).unwrap();
}
