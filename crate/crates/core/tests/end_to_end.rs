use std::sync::Arc;

use emotweet::classify::{
    predict_batch, train, ClassifierConfig, EncoderBackend, ReferenceBackend,
};
use emotweet::corpus::{multi_label_view, single_label_view, split_train_test};
use emotweet::metrics::{accuracy, f1, per_class_auroc, Averaging, RankedInstance};
use emotweet::synthetic::{synthetic_corpus, CorpusOptions};
use emotweet::Emotion;

fn backend() -> Arc<dyn EncoderBackend<f64>> {
    Arc::new(ReferenceBackend::default())
}

#[test]
fn single_head_on_synthetic_corpus() {
    let corpus = synthetic_corpus(&CorpusOptions::default());
    let split = split_train_test(&corpus, 100, 25, 13).unwrap();
    let (model, _) = train(
        &(&single_label_view(&split.train)).into(),
        backend(),
        &ClassifierConfig::single(),
    )
    .unwrap();
    let test = single_label_view(&split.test);
    assert_eq!(test.pairs.len(), 200);
    let texts: Vec<&str> = test.pairs.iter().map(|(t, _)| t.as_str()).collect();
    let truth: Vec<Emotion> = test.pairs.iter().map(|(_, l)| *l).collect();
    let pred: Vec<Emotion> = predict_batch(&model, &texts)
        .into_iter()
        .map(|s| s.unwrap().argmax())
        .collect();
    let acc: f64 = accuracy(&pred, &truth).unwrap();
    let micro: f64 = f1(&pred, &truth, Averaging::Micro, &Emotion::ALL).unwrap();
    assert!(acc >= 0.95, "accuracy {acc}");
    assert!((acc - micro).abs() < 1e-12);
}

#[test]
fn multi_head_on_synthetic_corpus() {
    let corpus = synthetic_corpus(&CorpusOptions {
        multi_label: true,
        ..Default::default()
    });
    let split = split_train_test(&corpus, 100, 25, 13).unwrap();
    let (model, _) = train(
        &(&multi_label_view(&split.train)).into(),
        backend(),
        &ClassifierConfig::multi(),
    )
    .unwrap();
    let test = multi_label_view(&split.test);
    let texts: Vec<&str> = test.pairs.iter().map(|(t, _)| t.as_str()).collect();
    let instances: Vec<RankedInstance<f64>> = predict_batch(&model, &texts)
        .into_iter()
        .zip(&test.pairs)
        .map(|(s, (_, labels))| {
            RankedInstance::new(s.unwrap().scores.to_vec(), labels.to_vec()).unwrap()
        })
        .collect();
    let names: Vec<&str> = Emotion::ALL.iter().map(|e| e.name()).collect();
    for (e, v) in Emotion::ALL
        .iter()
        .zip(per_class_auroc(&instances, &names).unwrap())
    {
        let v = v.unwrap();
        assert!(v >= 0.9, "{e}: {v}");
    }
}
