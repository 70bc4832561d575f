//! Seeded synthetic labeled corpora built from disjoint per-emotion
//! vocabularies. Used by the test suites and handy for smoke-testing the CLI
//! without tweet texts.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Emotion, LabeledExample, NUM_EMOTIONS};

/// Ten indicative words per emotion, canonical order. The first word of
/// each list is the planted keyword.
pub const EMOTION_VOCABULARY: [[&str; 10]; NUM_EMOTIONS] = [
    [
        "furious",
        "rage",
        "outraged",
        "livid",
        "angry",
        "hostile",
        "irate",
        "fuming",
        "seething",
        "infuriated",
    ],
    [
        "awaiting",
        "hopeful",
        "soon",
        "expecting",
        "countdown",
        "eager",
        "upcoming",
        "planning",
        "tomorrow",
        "prepare",
    ],
    [
        "gross",
        "disgusting",
        "vile",
        "nasty",
        "revolting",
        "filthy",
        "sickening",
        "repulsive",
        "yuck",
        "appalling",
    ],
    [
        "fever",
        "scared",
        "afraid",
        "terrified",
        "panic",
        "frightened",
        "dread",
        "anxious",
        "nervous",
        "worried",
    ],
    [
        "happy",
        "delighted",
        "cheerful",
        "grateful",
        "smiling",
        "wonderful",
        "celebrate",
        "laughing",
        "glad",
        "joyful",
    ],
    [
        "grief",
        "sad",
        "mourning",
        "heartbroken",
        "lonely",
        "tears",
        "crying",
        "sorrow",
        "depressed",
        "miserable",
    ],
    [
        "unexpected",
        "shocked",
        "suddenly",
        "astonished",
        "wow",
        "stunning",
        "unbelievable",
        "surprising",
        "amazed",
        "whoa",
    ],
    [
        "reliable",
        "trust",
        "confident",
        "faithful",
        "honest",
        "dependable",
        "believe",
        "support",
        "loyal",
        "secure",
    ],
];

/// Emotion-neutral words mixed into every text.
pub const FILLER: [&str; 20] = [
    "covid",
    "coronavirus",
    "today",
    "people",
    "news",
    "world",
    "week",
    "home",
    "city",
    "government",
    "everyone",
    "still",
    "really",
    "going",
    "the",
    "is",
    "and",
    "we",
    "this",
    "with",
];

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusOptions {
    pub per_emotion: usize,
    /// Attach secondary and tertiary labels.
    pub multi_label: bool,
    /// Share of each emotion's texts that contain its planted word, rounded
    /// to whole texts.
    pub plant_rate: f64,
    pub seed: u64,
}

impl Default for CorpusOptions {
    fn default() -> Self {
        Self {
            per_emotion: 125,
            multi_label: false,
            plant_rate: 0.9,
            seed: 13,
        }
    }
}

/// `per_emotion` examples for every emotion as primary label, texts attached.
/// Ids are `syn-<emotion>-<n>`.
pub fn synthetic_corpus(opts: &CorpusOptions) -> Vec<LabeledExample> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut out = Vec::with_capacity(opts.per_emotion * NUM_EMOTIONS);
    let planted = (opts.plant_rate.clamp(0.0, 1.0) * opts.per_emotion as f64).round() as usize;
    for primary in Emotion::ALL {
        let mut plant = vec![false; opts.per_emotion];
        plant[..planted].fill(true);
        plant.shuffle(&mut rng);
        for (n, plant) in plant.into_iter().enumerate() {
            let mut labels = vec![primary];
            if opts.multi_label {
                for p in [0.5, 0.25] {
                    if rng.gen_bool(p) {
                        let extra = loop {
                            let e = Emotion::ALL[rng.gen_range(0..NUM_EMOTIONS)];
                            if !labels.contains(&e) {
                                break e;
                            }
                        };
                        labels.push(extra);
                    }
                }
            }
            let text = synthetic_text(&labels, plant, &mut rng);
            let ex = LabeledExample::new(format!("syn-{primary}-{n}"), labels)
                .expect("1-3 distinct labels")
                .with_text(text);
            out.push(ex);
        }
    }
    out
}

/// Three words for the first label (plus its planted word when `plant`), two
/// for each further label, three fillers; shuffled.
pub fn synthetic_text<R: Rng>(labels: &[Emotion], plant: bool, rng: &mut R) -> String {
    let mut words: Vec<&str> = Vec::new();
    for (i, label) in labels.iter().enumerate() {
        let vocab = &EMOTION_VOCABULARY[label.index()];
        if i == 0 && plant {
            words.push(vocab[0]);
        }
        let n = if i == 0 { 3 } else { 2 };
        words.extend(vocab[1..].choose_multiple(rng, n).copied());
    }
    words.extend(FILLER.choose_multiple(rng, 3).copied());
    words.shuffle(rng);
    words.join(" ")
}

/// Writes the dataset file (`tweet_id,label1,label2,label3`).
pub fn dataset_csv(examples: &[LabeledExample]) -> String {
    let mut s = String::from("tweet_id,label1,label2,label3\n");
    for ex in examples {
        let mut cells: Vec<&str> = ex.labels().iter().map(|e| e.name()).collect();
        cells.resize(3, "");
        s.push_str(&format!("{},{}\n", ex.tweet_id, cells.join(",")));
    }
    s
}

/// Writes the id → text resolver file (JSON lines).
pub fn texts_jsonl(examples: &[LabeledExample]) -> String {
    let mut s = String::new();
    for ex in examples {
        if let Some(t) = &ex.text {
            s.push_str(&serde_json::json!({ "id": ex.tweet_id, "text": t }).to_string());
            s.push('\n');
        }
    }
    s
}
