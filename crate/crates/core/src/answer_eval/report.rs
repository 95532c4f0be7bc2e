use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::extract::ExtractedAnswer;
use super::metrics::Prf;

/// Outcome of one evaluated sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub sample_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<String>,
    pub prompt_hash: String,
    pub completion: Option<String>,
    pub extracted: Option<ExtractedAnswer>,
    pub gold: String,
    /// Relaxed-match verdict for factoid answers; failed calls are `Some(false)`.
    pub correct: Option<bool>,
    /// `1 - normalized edit distance` against the reference text.
    pub similarity: Option<f64>,
    /// Table metrics when a predicted table was scored.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rnss: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rms: Option<Prf>,
    pub error: Option<String>,
    pub latency_ms: u64,
    pub from_cache: bool,
    pub attempts: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSummary {
    pub n: usize,
    pub correct: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub n_samples: usize,
    pub n_errors: usize,
    /// Share of records with `correct == Some(true)` among those judged.
    pub relaxed_accuracy: Option<f64>,
    pub splits: BTreeMap<String, SplitSummary>,
    pub mean_similarity: Option<f64>,
    pub rnss: Option<f64>,
    pub rms_precision: Option<f64>,
    pub rms_recall: Option<f64>,
    pub rms_f1: Option<f64>,
    pub per_sample: Vec<EvalRecord>,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let v: Vec<f64> = values.collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

impl MetricReport {
    pub fn from_records(per_sample: Vec<EvalRecord>) -> Self {
        let judged: Vec<&EvalRecord> = per_sample.iter().filter(|r| r.correct.is_some()).collect();
        let is_correct = |r: &EvalRecord| r.correct == Some(true);
        let relaxed_accuracy =
            (!judged.is_empty()).then(|| judged.iter().filter(|r| is_correct(r)).count() as f64 / judged.len() as f64);

        let mut splits: BTreeMap<String, SplitSummary> = BTreeMap::new();
        for r in &judged {
            if let Some(s) = &r.split {
                let e = splits.entry(s.clone()).or_insert(SplitSummary { n: 0, correct: 0, accuracy: 0.0 });
                e.n += 1;
                e.correct += usize::from(is_correct(r));
            }
        }
        for s in splits.values_mut() {
            s.accuracy = s.correct as f64 / s.n as f64;
        }

        MetricReport {
            n_samples: per_sample.len(),
            n_errors: per_sample.iter().filter(|r| r.error.is_some()).count(),
            relaxed_accuracy,
            splits,
            mean_similarity: mean(per_sample.iter().filter_map(|r| r.similarity)),
            rnss: mean(per_sample.iter().filter_map(|r| r.rnss)),
            rms_precision: mean(per_sample.iter().filter_map(|r| r.rms.map(|m| m.precision))),
            rms_recall: mean(per_sample.iter().filter_map(|r| r.rms.map(|m| m.recall))),
            rms_f1: mean(per_sample.iter().filter_map(|r| r.rms.map(|m| m.f1))),
            per_sample,
        }
    }

    /// Mean of the per-split accuracies.
    pub fn split_average(&self) -> Option<f64> {
        mean(self.splits.values().map(|s| s.accuracy))
    }
}
