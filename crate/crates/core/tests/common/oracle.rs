//! Brute-force metric definitions, written independently of the library's
//! sort-based implementations.

#![allow(dead_code)]

/// Number of labels scoring at least as high as label `y`.
pub fn rank(scores: &[f64], y: usize) -> usize {
    scores.iter().filter(|s| **s >= scores[y]).count()
}

fn positives(truth: &[bool]) -> Vec<usize> {
    (0..truth.len()).filter(|&i| truth[i]).collect()
}

fn negatives(truth: &[bool]) -> Vec<usize> {
    (0..truth.len()).filter(|&i| !truth[i]).collect()
}

pub fn rankable(truth: &[bool]) -> bool {
    truth.iter().any(|t| *t) && truth.iter().any(|t| !*t)
}

pub fn lrap_instance(scores: &[f64], truth: &[bool]) -> f64 {
    let pos = positives(truth);
    let mut total = 0.0;
    for &y in &pos {
        let r = rank(scores, y);
        let above = pos.iter().filter(|&&z| rank(scores, z) <= r).count();
        total += above as f64 / r as f64;
    }
    total / pos.len() as f64
}

pub fn coverage_instance(scores: &[f64], truth: &[bool]) -> f64 {
    positives(truth)
        .into_iter()
        .map(|y| rank(scores, y))
        .max()
        .unwrap() as f64
}

pub fn ranking_loss_instance(scores: &[f64], truth: &[bool]) -> f64 {
    let pos = positives(truth);
    let neg = negatives(truth);
    let mut bad = 0;
    for &y in &pos {
        for &n in &neg {
            if scores[y] <= scores[n] {
                bad += 1;
            }
        }
    }
    bad as f64 / (pos.len() * neg.len()) as f64
}

fn mean_rankable(instances: &[(Vec<f64>, Vec<bool>)], f: fn(&[f64], &[bool]) -> f64) -> f64 {
    let vals: Vec<f64> = instances
        .iter()
        .filter(|(_, t)| rankable(t))
        .map(|(s, t)| f(s, t))
        .collect();
    vals.iter().sum::<f64>() / vals.len() as f64
}

pub fn lrap(instances: &[(Vec<f64>, Vec<bool>)]) -> f64 {
    mean_rankable(instances, lrap_instance)
}

pub fn coverage(instances: &[(Vec<f64>, Vec<bool>)]) -> f64 {
    mean_rankable(instances, coverage_instance)
}

pub fn ranking_loss(instances: &[(Vec<f64>, Vec<bool>)]) -> f64 {
    mean_rankable(instances, ranking_loss_instance)
}

/// Pairwise AUROC with half credit for ties.
pub fn auroc(scores: &[f64], truth: &[bool]) -> f64 {
    let mut credit = 0.0;
    let mut pairs = 0usize;
    for (i, &p) in truth.iter().enumerate() {
        if !p {
            continue;
        }
        for (j, &n) in truth.iter().enumerate() {
            if n {
                continue;
            }
            pairs += 1;
            if scores[i] > scores[j] {
                credit += 1.0;
            } else if scores[i] == scores[j] {
                credit += 0.5;
            }
        }
    }
    credit / pairs as f64
}

pub fn class_auroc(instances: &[(Vec<f64>, Vec<bool>)], class: usize) -> f64 {
    let s: Vec<f64> = instances.iter().map(|(s, _)| s[class]).collect();
    let t: Vec<bool> = instances.iter().map(|(_, t)| t[class]).collect();
    auroc(&s, &t)
}

pub fn micro_auroc(instances: &[(Vec<f64>, Vec<bool>)]) -> f64 {
    let s: Vec<f64> = instances.iter().flat_map(|(s, _)| s.clone()).collect();
    let t: Vec<bool> = instances.iter().flat_map(|(_, t)| t.clone()).collect();
    auroc(&s, &t)
}

pub fn population_variance(values: &[f64]) -> f64 {
    let m = values.iter().sum::<f64>() / values.len() as f64;
    values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64
}
