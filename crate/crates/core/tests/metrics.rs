mod common;

use common::oracle;
use emotweet::metrics::{
    accuracy, auroc, coverage_error, f1, label_ranking_average_precision, micro_average_auroc,
    per_class_auroc, ranking_loss, Averaging, RankedInstance,
};
use emotweet::{Emotion, Instance};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Raw = (Vec<f64>, Vec<bool>);

fn random_raw(rng: &mut impl Rng, labels: usize, quantize: Option<f64>) -> Raw {
    let k = rng.gen_range(1..=3);
    let mut truth = vec![false; labels];
    while truth.iter().filter(|t| **t).count() < k {
        truth[rng.gen_range(0..labels)] = true;
    }
    let scores = (0..labels)
        .map(|_| {
            let s: f64 = rng.gen();
            quantize.map_or(s, |q| (s / q).floor() * q)
        })
        .collect();
    (scores, truth)
}

fn to_instances(raw: &[Raw]) -> Vec<Instance> {
    raw.iter()
        .map(|(s, t)| RankedInstance::new(s.clone(), t.clone()).unwrap())
        .collect()
}

fn names() -> Vec<&'static str> {
    Emotion::ALL.iter().map(|e| e.name()).collect()
}

#[test]
fn ranking_metrics_match_brute_force_with_and_without_ties() {
    for (seed, quantize) in [(1u64, None), (2, Some(0.25)), (3, Some(0.1))] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw: Vec<Raw> = (0..500)
            .map(|_| random_raw(&mut rng, 8, quantize))
            .collect();
        let inst = to_instances(&raw);
        assert!(
            (label_ranking_average_precision(&inst).unwrap().value - oracle::lrap(&raw)).abs()
                < 1e-9
        );
        assert!((coverage_error(&inst).unwrap().value - oracle::coverage(&raw)).abs() < 1e-9);
        assert!((ranking_loss(&inst).unwrap().value - oracle::ranking_loss(&raw)).abs() < 1e-9);
        for (c, v) in per_class_auroc(&inst, &names())
            .unwrap()
            .into_iter()
            .enumerate()
        {
            assert!((v.unwrap() - oracle::class_auroc(&raw, c)).abs() < 1e-9);
        }
        assert!((micro_average_auroc(&inst).unwrap() - oracle::micro_auroc(&raw)).abs() < 1e-9);
    }
}

#[test]
fn micro_auroc_matches_pairwise_count_on_50_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    for _ in 0..50 {
        let n = rng.gen_range(2..40);
        let raw: Vec<Raw> = (0..n)
            .map(|_| random_raw(&mut rng, 8, Some(0.05)))
            .collect();
        let got = micro_average_auroc(&to_instances(&raw)).unwrap();
        assert!((got - oracle::micro_auroc(&raw)).abs() < 1e-9);
    }
}

#[test]
fn reversing_scores_complements_ranking_loss() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let (s, t) = random_raw(&mut rng, 8, None);
        let fwd = ranking_loss(&to_instances(&[(s.clone(), t.clone())]))
            .unwrap()
            .value;
        let rev: Vec<f64> = s.iter().map(|x| -x).collect();
        let back = ranking_loss(&to_instances(&[(rev, t)])).unwrap().value;
        assert!((fwd + back - 1.0).abs() < 1e-12);
    }
}

#[test]
fn micro_f1_equals_accuracy_for_single_label() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let n = rng.gen_range(1..60);
        let truth: Vec<Emotion> = (0..n).map(|_| Emotion::ALL[rng.gen_range(0..8)]).collect();
        let pred: Vec<Emotion> = truth
            .iter()
            .map(|t| {
                if rng.gen_bool(0.6) {
                    *t
                } else {
                    Emotion::ALL[rng.gen_range(0..8)]
                }
            })
            .collect();
        let acc: f64 = accuracy(&pred, &truth).unwrap();
        let micro: f64 = f1(&pred, &truth, Averaging::Micro, &Emotion::ALL).unwrap();
        assert!((acc - micro).abs() < 1e-12);
    }
}

fn instance_strategy() -> impl Strategy<Value = Raw> {
    (
        prop::collection::vec(0.0f64..1.0, 8),
        prop::collection::vec(any::<bool>(), 8),
    )
        .prop_filter("rankable", |(_, t)| oracle::rankable(t))
}

fn all_metrics(raw: &[Raw]) -> Vec<f64> {
    let inst = to_instances(raw);
    let mut out = vec![
        label_ranking_average_precision(&inst).unwrap().value,
        coverage_error(&inst).unwrap().value,
        ranking_loss(&inst).unwrap().value,
    ];
    for c in 0..8 {
        let s: Vec<f64> = raw.iter().map(|(s, _)| s[c]).collect();
        let t: Vec<bool> = raw.iter().map(|(_, t)| t[c]).collect();
        out.push(auroc(&s, &t).unwrap_or(f64::NAN));
    }
    out.push(micro_average_auroc(&inst).unwrap());
    out
}

fn same(a: &[f64], b: &[f64]) -> bool {
    a.iter()
        .zip(b)
        .all(|(x, y)| x == y || (x.is_nan() && y.is_nan()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn monotone_transforms_leave_metrics_unchanged(raw in prop::collection::vec(instance_strategy(), 1..20)) {
        let before = all_metrics(&raw);
        for f in [|x: f64| x.exp(), |x: f64| 3.0 * x - 7.0, |x: f64| x * x * x + x] {
            let mapped: Vec<Raw> = raw.iter().map(|(s, t)| (s.iter().map(|v| f(*v)).collect(), t.clone())).collect();
            prop_assert!(same(&before, &all_metrics(&mapped)));
        }
    }

    #[test]
    fn label_permutation_leaves_metrics_unchanged(
        raw in prop::collection::vec(instance_strategy(), 1..20),
        perm in Just((0..8).collect::<Vec<usize>>()).prop_shuffle(),
    ) {
        let permuted: Vec<Raw> = raw
            .iter()
            .map(|(s, t)| (perm.iter().map(|&i| s[i]).collect(), perm.iter().map(|&i| t[i]).collect()))
            .collect();
        let a = all_metrics(&raw);
        let b = all_metrics(&permuted);
        // example-based metrics and micro-AUROC are invariant; per-class AUROCs move with the labels
        prop_assert!(same(&a[..3], &b[..3]));
        prop_assert_eq!(a[11], b[11]);
        for (new, &old) in perm.iter().enumerate() {
            prop_assert!(same(&[a[3 + old]], &[b[3 + new]]));
        }
    }

    #[test]
    fn per_instance_bounds((s, t) in instance_strategy()) {
        let k = t.iter().filter(|x| **x).count() as f64;
        let inst = to_instances(&[(s.clone(), t.clone())]);
        let cov = coverage_error(&inst).unwrap().value;
        prop_assert!(cov >= k && cov <= 8.0);
        let loss = ranking_loss(&inst).unwrap().value;
        prop_assert!((0.0..=1.0).contains(&loss));
        let strictly_separated = s.iter().zip(&t).filter(|(_, y)| **y)
            .all(|(p, _)| s.iter().zip(&t).filter(|(_, y)| !**y).all(|(n, _)| p > n));
        prop_assert_eq!(loss == 0.0, strictly_separated);
        let ap = label_ranking_average_precision(&inst).unwrap().value;
        prop_assert!(ap > 0.0 && ap <= 1.0);
    }
}
