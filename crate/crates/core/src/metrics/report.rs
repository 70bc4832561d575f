use std::io::{self, Write};

use serde_json::{Map, Value};

use crate::corpus::Emotion;
use crate::error::Result;
use crate::metrics::{
    accuracy, coverage_error, f1, label_ranking_average_precision, micro_average_auroc,
    per_class_auroc, ranking_loss, Averaging, RankedInstance,
};

/// Ordered metric name → value pairs. Undefined values are `NaN`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvaluationReport {
    pub entries: Vec<(String, f64)>,
    pub notes: Vec<String>,
}

impl EvaluationReport {
    pub fn push(&mut self, key: impl Into<String>, value: f64) {
        self.entries.push((key.into(), value));
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    /// `key = value` lines; values with 6 decimals, counts as integers.
    pub fn write_text<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (k, v) in &self.entries {
            if v.is_nan() {
                writeln!(out, "{k} = NaN")?;
            } else if v.fract() == 0.0 && (k.starts_with("n_") || k.ends_with("_excluded")) {
                writeln!(out, "{k} = {v:.0}")?;
            } else {
                writeln!(out, "{k} = {v:.6}")?;
            }
        }
        for n in &self.notes {
            writeln!(out, "# {n}")?;
        }
        Ok(())
    }

    /// JSON object of metric values (full precision, `null` for `NaN`) plus
    /// a `notes` array.
    pub fn to_json(&self) -> Value {
        let mut metrics = Map::new();
        for (k, v) in &self.entries {
            metrics.insert(
                k.clone(),
                serde_json::Number::from_f64(*v)
                    .map(Value::Number)
                    .unwrap_or(Value::Null),
            );
        }
        let mut root = Map::new();
        root.insert("metrics".into(), Value::Object(metrics));
        root.insert(
            "notes".into(),
            Value::Array(self.notes.iter().cloned().map(Value::String).collect()),
        );
        Value::Object(root)
    }
}

/// Accuracy with macro and micro F1 over the eight emotions.
pub fn evaluate_single(predicted: &[Emotion], truth: &[Emotion]) -> Result<EvaluationReport> {
    let mut r = EvaluationReport::default();
    r.push("n_examples", truth.len() as f64);
    r.push("accuracy", accuracy::<f64, _>(predicted, truth)?);
    r.push(
        "f1_macro",
        f1::<f64, _>(predicted, truth, Averaging::Macro, &Emotion::ALL)?,
    );
    r.push(
        "f1_micro",
        f1::<f64, _>(predicted, truth, Averaging::Micro, &Emotion::ALL)?,
    );
    Ok(r)
}

/// Label-ranking average precision, coverage error, ranking loss, AUROC per
/// emotion and micro-averaged AUROC.
pub fn evaluate_multi(instances: &[RankedInstance<f64>]) -> Result<EvaluationReport> {
    let mut r = EvaluationReport::default();
    r.push("n_examples", instances.len() as f64);
    let lrap = label_ranking_average_precision(instances)?;
    r.push("average_precision", lrap.value);
    r.push("coverage_error", coverage_error(instances)?.value);
    r.push("ranking_loss", ranking_loss(instances)?.value);
    r.push("ranking_excluded", lrap.excluded as f64);
    let names: Vec<&str> = Emotion::ALL.iter().map(|e| e.name()).collect();
    for (e, v) in Emotion::ALL.iter().zip(per_class_auroc(instances, &names)?) {
        match v {
            Ok(v) => r.push(format!("auroc_{e}"), v),
            Err(err) => {
                r.push(format!("auroc_{e}"), f64::NAN);
                r.notes.push(err.to_string());
            }
        }
    }
    match micro_average_auroc(instances) {
        Ok(v) => r.push("auroc_micro", v),
        Err(err) => {
            r.push("auroc_micro", f64::NAN);
            r.notes.push(err.to_string());
        }
    }
    Ok(r)
}
