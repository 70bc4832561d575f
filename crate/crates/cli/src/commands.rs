use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use emotweet::classify::model_io::{read_model_with, write_model};
use emotweet::classify::{
    predict_batch, train, BackendSpec, ClassifierConfig, EncoderBackend, HeadKind,
    ReferenceBackend, TrainingSet,
};
use emotweet::corpus::{
    load_emoct, load_text_resolver, multi_label_view, single_label_view, split_train_test,
};
use emotweet::ingest::{
    filter_by_keywords, open_archive, parse_tweet_stream, IngestStats, KeywordQuery, TweetRecord,
};
use emotweet::keywords::{
    pos_keyword_table, salience_keyword_table, LexiconTagger, SalienceOptions, StopwordStage,
    Stopwords,
};
use emotweet::metrics::report::{evaluate_multi, evaluate_single};
use emotweet::metrics::RankedInstance;
use emotweet::predictions::{read_predictions, write_predictions, PredictionRecord};
use emotweet::trends::{daily_emotion_distribution, detect_spikes, variance_ranking};
use emotweet::{Emotion, Error, LabeledExample, Model};

use crate::args::*;

/// Marks failures that are not the caller's fault (exit code 1).
#[derive(Debug)]
pub struct Fatal(pub String);

impl std::fmt::Display for Fatal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Fatal {}

pub struct Ctx {
    pub seed: u64,
    pub quiet: bool,
}

impl Ctx {
    fn note(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Fatal(format!("creating {}: {e}", dir.display())))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Fatal(format!("creating {}: {e}", path.display())).into())
}

fn finish(mut w: impl Write, path: &Path) -> Result<()> {
    w.flush()
        .map_err(|e| Fatal(format!("writing {}: {e}", path.display())).into())
}

fn emit(out: Option<&Path>, write: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
    match out {
        Some(path) => {
            let mut w = create(path)?;
            write(&mut w).map_err(|e| Fatal(format!("writing {}: {e}", path.display())))?;
            finish(w, path)
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock).map_err(|e| Fatal(format!("writing stdout: {e}")))?;
            Ok(())
        }
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(
        File::open(path).with_context(|| format!("opening {}", path.display()))?,
    ))
}

fn read_archives(paths: &[impl AsRef<Path>]) -> Result<(Vec<TweetRecord>, IngestStats)> {
    let mut records = Vec::new();
    let mut stats = IngestStats::default();
    for p in paths {
        let p = p.as_ref();
        let src = open_archive(p).with_context(|| format!("opening {}", p.display()))?;
        let (recs, s) =
            parse_tweet_stream(src).with_context(|| format!("reading {}", p.display()))?;
        records.extend(recs);
        stats = stats.merge(&s);
    }
    Ok((records, stats))
}

pub fn stats(ctx: &Ctx, a: &StatsArgs) -> Result<()> {
    let (_, stats) = read_archives(&a.input)?;
    ctx.note(format!(
        "{} lines, {} parsed, {} malformed, {} without country",
        stats.total, stats.parsed, stats.malformed, stats.missing_geo
    ));
    let counts = match a.by {
        GroupBy::Lang => &stats.by_lang,
        GroupBy::Country => &stats.by_country,
    };
    emit(a.out.as_deref(), |w| {
        emotweet::ingest::write_counts(counts, w)
    })
}

fn keyword_query(src: &KeywordSource) -> Result<KeywordQuery> {
    let mut words: Vec<String> = src
        .keywords
        .iter()
        .filter(|k| !k.trim().is_empty())
        .cloned()
        .collect();
    if let Some(path) = &src.keywords_file {
        for line in open(path)?.lines() {
            let line = line?;
            if !line.trim().is_empty() {
                words.push(line.trim().to_owned());
            }
        }
    }
    if words.is_empty() {
        bail!("no keywords: pass --keywords or --keywords-file");
    }
    Ok(KeywordQuery::new(&words, src.matching.into())?)
}

pub fn filter(ctx: &Ctx, a: &FilterArgs) -> Result<()> {
    let query = keyword_query(&a.keywords)?;
    let (records, stats) = read_archives(&a.input)?;
    let kept = filter_by_keywords(&records, &query);
    ctx.note(format!(
        "kept {} of {} tweets ({} malformed lines)",
        kept.len(),
        records.len(),
        stats.malformed
    ));
    emit(Some(&a.out), |w| {
        for r in &kept {
            writeln!(w, "{}", r.to_json_line())?;
        }
        Ok(())
    })
}

fn resolve_backend(spec: &BackendSpec) -> emotweet::Result<Arc<dyn EncoderBackend<f64>>> {
    match spec {
        BackendSpec::Reference { width_exponent } => {
            Ok(Arc::new(ReferenceBackend::new(*width_exponent)?))
        }
        BackendSpec::Transformer { artifact } => Err(transformer_unavailable(artifact)),
    }
}

#[cfg(feature = "transformer")]
fn transformer_unavailable(artifact: &str) -> Error {
    use emotweet::classify::transformer::{locate_artifact, MODEL_DIR_ENV};
    match locate_artifact(None, artifact) {
        Err(e) => e,
        Ok(path) => Error::BackendUnavailable(format!(
            "found {} but this build has no transformer runtime; link a `PretrainedEncoder` implementation \
             through the library, or use --backend reference ({MODEL_DIR_ENV} only locates artifacts)",
            path.display()
        )),
    }
}

#[cfg(not(feature = "transformer"))]
fn transformer_unavailable(_artifact: &str) -> Error {
    Error::BackendUnavailable(
        "built without the `transformer` feature; rebuild with `--features transformer`".into(),
    )
}

fn load_dataset(ctx: &Ctx, data: &DatasetArgs) -> Result<emotweet::corpus::CorpusSplit> {
    let texts = load_text_resolver(open(&data.texts)?)
        .with_context(|| format!("reading {}", data.texts.display()))?;
    let loaded = load_emoct(open(&data.dataset)?, Some(&texts))
        .with_context(|| format!("reading {}", data.dataset.display()))?;
    if !loaded.rejected.is_empty() {
        let rows: Vec<String> = loaded
            .rejected
            .iter()
            .map(|d| format!("{}: row {}: {}", data.dataset.display(), d.row, d.message))
            .collect();
        bail!(Error::InvalidInput(rows.join("\n")));
    }
    let missing = loaded.examples.iter().filter(|e| e.text.is_none()).count();
    if missing > 0 {
        ctx.note(format!(
            "{missing} labeled tweets have no text and are skipped"
        ));
    }
    Ok(split_train_test(
        &loaded.examples,
        data.train_per_emotion,
        data.test_per_emotion,
        ctx.seed,
    )?)
}

fn training_set(kind: HeadKind, examples: &[LabeledExample]) -> TrainingSet {
    match kind {
        HeadKind::Single => (&single_label_view(examples)).into(),
        HeadKind::Multi => (&multi_label_view(examples)).into(),
    }
}

pub fn train_cmd(ctx: &Ctx, a: &TrainArgs) -> Result<()> {
    let backend = resolve_backend(&a.backend)?;
    let split = load_dataset(ctx, &a.data)?;
    let mut config = ClassifierConfig::for_head(a.task);
    config.seed = ctx.seed;
    if let Some(e) = a.epochs {
        config.epochs = e;
    }
    config.learning_rate = a.learning_rate.or(config.learning_rate);
    if let Some(l2) = a.l2_penalty {
        config.l2_penalty = l2;
    }
    if let Some(t) = a.threshold {
        config.threshold = t;
    }
    let data = training_set(a.task, &split.train);
    let (model, report) = train(&data, backend, &config)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    ctx.note(format!(
        "trained {} head on {} examples, final loss {:.6}",
        a.task,
        data.len(),
        report.final_loss
    ));
    let mut w = create(&a.out)?;
    write_model(&model, &mut w).map_err(|e| Fatal(format!("writing {}: {e}", a.out.display())))?;
    finish(w, &a.out)
}

fn load_model(path: &Path) -> Result<Model> {
    read_model_with(open(path)?, resolve_backend)
        .with_context(|| format!("loading model {}", path.display()))
}

pub fn evaluate(ctx: &Ctx, a: &EvaluateArgs) -> Result<()> {
    let model = load_model(&a.model)?;
    if let Some(task) = a.task {
        if task != model.kind() {
            bail!(Error::InvalidInput(format!(
                "--task {task} does not match the model's {} head",
                model.kind()
            )));
        }
    }
    let split = load_dataset(ctx, &a.data)?;
    let examples: Vec<LabeledExample> = match a.split {
        SplitSide::Train => split.train,
        SplitSide::Test => split.test,
        SplitSide::All => split.train.into_iter().chain(split.test).collect(),
    };
    let data = training_set(model.kind(), &examples);
    let scored = predict_batch(&model, &data.texts);
    let mut kept = Vec::new();
    let mut skipped = 0;
    for (s, t) in scored.into_iter().zip(&data.targets) {
        match s {
            Ok(s) => kept.push((s, *t)),
            Err(Error::InvalidInput(_)) => skipped += 1,
            Err(e) => return Err(e.into()),
        }
    }
    let mut report = match model.kind() {
        HeadKind::Single => {
            let mut pred = Vec::new();
            let mut truth = Vec::new();
            for (s, t) in &kept {
                if let emotweet::classify::Target::Class(k) = t {
                    pred.push(s.argmax());
                    truth.push(Emotion::ALL[*k]);
                }
            }
            evaluate_single(&pred, &truth)?
        }
        HeadKind::Multi => {
            let instances = kept
                .iter()
                .map(|(s, t)| match t {
                    emotweet::classify::Target::Labels(y) => {
                        RankedInstance::new(s.scores.to_vec(), y.to_vec())
                    }
                    emotweet::classify::Target::Class(_) => {
                        unreachable!("multi view yields label vectors")
                    }
                })
                .collect::<emotweet::Result<Vec<_>>>()?;
            evaluate_multi(&instances)?
        }
    };
    if skipped > 0 {
        report
            .notes
            .push(format!("{skipped} examples without tokens skipped"));
    }
    emit(a.out.as_deref(), |w| report.write_text(w))?;
    if let Some(path) = &a.json {
        emit(Some(path), |w| {
            serde_json::to_writer_pretty(&mut *w, &report.to_json())?;
            writeln!(w)
        })?;
    }
    Ok(())
}

fn stopwords(a: &StopwordArgs) -> Result<Stopwords> {
    Ok(match a.stopwords.as_deref() {
        None => Stopwords::english(),
        Some("none") => Stopwords::none(),
        Some(path) => Stopwords::from_reader(open(Path::new(path))?)?,
    })
}

pub fn predict(ctx: &Ctx, a: &PredictArgs) -> Result<()> {
    let model = load_model(&a.model)?;
    let stop = stopwords(&a.stopwords)?;
    let (tweets, stats) = read_archives(&a.input)?;
    let texts: Vec<&str> = tweets.iter().map(|t| t.text.as_str()).collect();
    let mut records = Vec::with_capacity(tweets.len());
    let mut skipped = 0;
    for (tweet, scored) in tweets.iter().zip(predict_batch(&model, &texts)) {
        match scored {
            Ok(s) => records.push(PredictionRecord::new(tweet, s, &stop)),
            Err(Error::InvalidInput(_)) => skipped += 1,
            Err(e) => return Err(e.into()),
        }
    }
    ctx.note(format!(
        "predicted {} tweets, skipped {skipped} without tokens and {} malformed lines",
        records.len(),
        stats.malformed
    ));
    emit(Some(&a.out), |w| write_predictions(&records, w))
}

fn load_predictions(path: &Path) -> Result<Vec<PredictionRecord>> {
    read_predictions(open(path)?).with_context(|| format!("reading {}", path.display()))
}

pub fn keywords(ctx: &Ctx, a: &KeywordsArgs) -> Result<()> {
    let records = load_predictions(&a.predictions)?;
    let stop = stopwords(&a.stopwords)?;
    let table = match a.method {
        Method::Attention => {
            let opts = SalienceOptions {
                emotions: &a.emotions,
                k: a.k,
                limit: a.top,
                stopwords: &stop,
                stage: match a.stopword_stage {
                    Stage::Before => StopwordStage::BeforeSelection,
                    Stage::After => StopwordStage::AfterAggregation,
                },
            };
            salience_keyword_table(records.iter().map(PredictionRecord::as_salient), &opts)
        }
        Method::Pos => {
            let Some(lexicon) = &a.lexicon else {
                bail!(Error::InvalidInput(
                    "--method pos needs --lexicon FILE".into()
                ));
            };
            let mut tagger = LexiconTagger::from_reader(open(lexicon)?)?;
            if !a.lexicon_langs.is_empty() {
                tagger = tagger.with_languages(a.lexicon_langs.iter().cloned());
            }
            let out = pos_keyword_table(
                records.iter().map(PredictionRecord::as_taggable),
                &tagger,
                &a.emotions,
                a.top,
                &stop,
            );
            if out.skipped > 0 {
                ctx.note(format!(
                    "{} tweets skipped: language not covered by the lexicon",
                    out.skipped
                ));
            }
            out.table
        }
    };
    ctx.note(format!("{} keywords", table.len()));
    emit(Some(&a.out), |w| table.write_tsv(w))
}

pub fn trend(ctx: &Ctx, a: &TrendArgs) -> Result<()> {
    let records = load_predictions(&a.predictions)?;
    let query = if a.keyword.is_empty() {
        None
    } else {
        Some(KeywordQuery::new(&a.keyword, a.matching.into())?)
    };
    let selected = records
        .iter()
        .filter(|r| query.as_ref().is_none_or(|q| q.matches(&r.text)))
        .map(|r| (r.date, r.label));
    let series = daily_emotion_distribution::<f64>(selected, a.from, a.to)?;
    emit(Some(&a.out), |w| series.write_csv(w))?;

    let empty = series.empty_days();
    if !empty.is_empty() {
        ctx.note(format!("{} days without tweets", empty.len()));
    }
    match variance_ranking(&series) {
        Ok(ranked) => {
            let line: Vec<String> = ranked.iter().map(|(e, v)| format!("{e}={v:.6}")).collect();
            ctx.note(format!("variance: {}", line.join(" ")));
        }
        Err(e) => ctx.note(format!("variance: {e}")),
    }
    if a.spikes {
        let mut lines = Vec::new();
        for e in Emotion::ALL {
            for s in detect_spikes(&series, e, a.z)? {
                lines.push(format!(
                    "{}\t{}\t{:.6}\t{:.6}",
                    s.date.format("%Y-%m-%d"),
                    s.emotion,
                    s.delta,
                    s.zscore
                ));
            }
        }
        emit(a.spikes_out.as_deref(), |w| {
            writeln!(w, "date\temotion\tdelta\tzscore")?;
            for l in &lines {
                writeln!(w, "{l}")?;
            }
            Ok(())
        })?;
    }
    Ok(())
}
