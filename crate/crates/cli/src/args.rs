use std::path::PathBuf;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};
use emotweet::classify::{BackendSpec, HeadKind};
use emotweet::ingest::MatchPolicy;
use emotweet::Emotion;

#[derive(Debug, Parser)]
#[command(name = "emotweet", version, about = "Emotion analysis for tweets")]
pub struct Cli {
    /// Seed for splits and training.
    #[arg(long, global = true, default_value_t = emotweet::classify::DEFAULT_SEED)]
    pub seed: u64,

    /// Suppress progress and summary messages.
    #[arg(long, global = true)]
    pub quiet: bool,

    /// File of `key=value` lines; each key is a long flag name. Flags given
    /// on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count tweets per language or country.
    Stats(StatsArgs),
    /// Keep tweets whose text mentions any keyword.
    Filter(FilterArgs),
    /// Train a classifier on the labeled dataset.
    Train(TrainArgs),
    /// Score a model on the labeled dataset.
    Evaluate(EvaluateArgs),
    /// Classify tweets and store per-tweet scores and salience.
    Predict(PredictArgs),
    /// Build a keyword table from stored predictions.
    Keywords(KeywordsArgs),
    /// Daily emotion distribution over stored predictions.
    Trend(TrendArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GroupBy {
    Lang,
    Country,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Tweet archives (JSON lines, optionally gzipped).
    #[arg(long, required = true, num_args = 1..)]
    pub input: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "lang")]
    pub by: GroupBy,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Matching {
    Auto,
    Word,
    Substring,
}

impl From<Matching> for MatchPolicy {
    fn from(m: Matching) -> Self {
        match m {
            Matching::Auto => MatchPolicy::Auto,
            Matching::Word => MatchPolicy::WordBoundary,
            Matching::Substring => MatchPolicy::Substring,
        }
    }
}

#[derive(Debug, Args)]
pub struct KeywordSource {
    /// Comma-separated keywords.
    #[arg(long, value_delimiter = ',')]
    pub keywords: Vec<String>,
    /// File with one keyword per line.
    #[arg(long)]
    pub keywords_file: Option<PathBuf>,
    #[arg(long = "match", value_enum, default_value = "auto")]
    pub matching: Matching,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    #[arg(long, required = true, num_args = 1..)]
    pub input: Vec<PathBuf>,
    #[command(flatten)]
    pub keywords: KeywordSource,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DatasetArgs {
    /// Labeled dataset: `tweet_id,label1,label2,label3`.
    #[arg(long)]
    pub dataset: PathBuf,
    /// Tweet texts as JSON lines with `id` and `text`.
    #[arg(long)]
    pub texts: PathBuf,
    #[arg(long, default_value_t = 100)]
    pub train_per_emotion: usize,
    #[arg(long, default_value_t = 25)]
    pub test_per_emotion: usize,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DatasetArgs,
    #[arg(long, default_value = "single")]
    pub task: HeadKind,
    /// `reference[:EXP]` or `transformer[:ARTIFACT]`.
    #[arg(long, default_value = "reference:18")]
    pub backend: BackendSpec,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub l2_penalty: Option<f64>,
    /// Multi-label decision threshold.
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SplitSide {
    Train,
    Test,
    All,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub data: DatasetArgs,
    /// Defaults to the model's head.
    #[arg(long)]
    pub task: Option<HeadKind>,
    #[arg(long, value_enum, default_value = "test")]
    pub split: SplitSide,
    /// Text report; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StopwordArgs {
    /// Stopword file (one per line) or `none`; the built-in English list by default.
    #[arg(long)]
    pub stopwords: Option<String>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, required = true, num_args = 1..)]
    pub input: Vec<PathBuf>,
    #[command(flatten)]
    pub stopwords: StopwordArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Attention,
    Pos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Stage {
    Before,
    After,
}

#[derive(Debug, Args)]
pub struct KeywordsArgs {
    #[arg(long)]
    pub predictions: PathBuf,
    #[arg(long, value_enum, default_value = "attention")]
    pub method: Method,
    #[arg(long, value_delimiter = ',', default_value = "fear,sadness")]
    pub emotions: Vec<Emotion>,
    #[arg(long, default_value_t = emotweet::keywords::DEFAULT_TABLE_SIZE)]
    pub top: usize,
    /// Salient tokens taken per tweet.
    #[arg(long, default_value_t = emotweet::keywords::DEFAULT_TOP_K)]
    pub k: usize,
    #[command(flatten)]
    pub stopwords: StopwordArgs,
    /// Apply stopwords before top-k selection or after counting.
    #[arg(long, value_enum, default_value = "before")]
    pub stopword_stage: Stage,
    /// `token<TAB>TAG` lexicon for the pos method.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// Languages the lexicon covers (comma-separated); others are skipped.
    #[arg(long, value_delimiter = ',')]
    pub lexicon_langs: Vec<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrendArgs {
    #[arg(long)]
    pub predictions: PathBuf,
    /// Restrict to tweets mentioning any of these words.
    #[arg(long, value_delimiter = ',')]
    pub keyword: Vec<String>,
    #[arg(long = "match", value_enum, default_value = "auto")]
    pub matching: Matching,
    #[arg(long)]
    pub from: NaiveDate,
    #[arg(long)]
    pub to: NaiveDate,
    #[arg(long)]
    pub out: PathBuf,
    /// Report spikes for every emotion.
    #[arg(long)]
    pub spikes: bool,
    #[arg(long, default_value_t = emotweet::trends::DEFAULT_Z_THRESHOLD)]
    pub z: f64,
    /// Spike report file; stdout when absent.
    #[arg(long)]
    pub spikes_out: Option<PathBuf>,
}
