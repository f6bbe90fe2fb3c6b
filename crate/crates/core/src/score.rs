//! Challenge scoring: per-class F1 over the four-way confusion matrix, with
//! the final score averaging Normal, AF and Other (Noisy is reported but not
//! scored).

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::dataset::DatasetManifest;
use crate::signal::Label;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScoreError {
    #[error("{truths} truths but {preds} predictions")]
    LengthMismatch { truths: usize, preds: usize },
    #[error("nothing to score")]
    Empty,
    #[error("no prediction for record {0}")]
    MissingPrediction(String),
    #[error("prediction for unknown record {0}")]
    UnknownRecord(String),
}

/// Rows are truth, columns are prediction, in label-code order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ConfusionMatrix {
    counts: [[u64; 4]; 4],
}

impl ConfusionMatrix {
    pub fn from_counts(counts: [[u64; 4]; 4]) -> Self {
        Self { counts }
    }

    pub fn counts(&self) -> &[[u64; 4]; 4] {
        &self.counts
    }

    pub fn get(&self, truth: Label, pred: Label) -> u64 {
        self.counts[truth.code() as usize][pred.code() as usize]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }
}

pub fn confusion(truths: &[Label], preds: &[Label]) -> Result<ConfusionMatrix, ScoreError> {
    if truths.len() != preds.len() {
        return Err(ScoreError::LengthMismatch {
            truths: truths.len(),
            preds: preds.len(),
        });
    }
    if truths.is_empty() {
        return Err(ScoreError::Empty);
    }
    let mut counts = [[0u64; 4]; 4];
    for (t, p) in truths.iter().zip(preds) {
        counts[t.code() as usize][p.code() as usize] += 1;
    }
    Ok(ConfusionMatrix { counts })
}

/// 2·TP / (2·TP + FP + FN), or 0 when the denominator is 0.
pub fn f1_per_class(cm: &ConfusionMatrix, class: Label) -> f64 {
    let c = class.code() as usize;
    let tp = cm.counts[c][c];
    let row: u64 = cm.counts[c].iter().sum();
    let col: u64 = cm.counts.iter().map(|r| r[c]).sum();
    let (fn_, fp) = (row - tp, col - tp);
    let denom = 2 * tp + fp + fn_;
    if denom == 0 {
        0.0
    } else {
        (2 * tp) as f64 / denom as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreReport {
    pub f1_normal: f64,
    pub f1_af: f64,
    pub f1_other: f64,
    pub f1_noisy: f64,
    pub final_score: f64,
    pub confusion: ConfusionMatrix,
}

impl ScoreReport {
    /// Human-readable report with the confusion matrix.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("final_score = {:.4}\n", self.final_score));
        out.push_str(&format!("f1_normal   = {:.4}\n", self.f1_normal));
        out.push_str(&format!("f1_af       = {:.4}\n", self.f1_af));
        out.push_str(&format!("f1_other    = {:.4}\n", self.f1_other));
        out.push_str(&format!(
            "f1_noisy    = {:.4}  (not scored)\n",
            self.f1_noisy
        ));
        out.push_str(&format!("records     = {}\n\n", self.confusion.total()));
        out.push_str("truth\\pred       N       A       O       ~\n");
        for truth in Label::ALL {
            out.push_str(&format!("{:<9}", truth.letter()));
            for pred in Label::ALL {
                out.push_str(&format!("{:>8}", self.confusion.get(truth, pred)));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn challenge_score(cm: &ConfusionMatrix) -> ScoreReport {
    let f1_normal = f1_per_class(cm, Label::Normal);
    let f1_af = f1_per_class(cm, Label::AF);
    let f1_other = f1_per_class(cm, Label::Other);
    ScoreReport {
        f1_normal,
        f1_af,
        f1_other,
        f1_noisy: f1_per_class(cm, Label::Noisy),
        final_score: (f1_normal + f1_af + f1_other) / 3.0,
        confusion: *cm,
    }
}

/// Joins predictions against a manifest's labels. Every manifest record must
/// have exactly one prediction and no prediction may name an unknown record.
pub fn score_predictions(
    predictions: &BTreeMap<String, Label>,
    manifest: &DatasetManifest,
) -> Result<ScoreReport, ScoreError> {
    let mut truths = Vec::with_capacity(manifest.len());
    let mut preds = Vec::with_capacity(manifest.len());
    for entry in manifest.entries() {
        let pred = predictions
            .get(&entry.record_id)
            .ok_or_else(|| ScoreError::MissingPrediction(entry.record_id.clone()))?;
        truths.push(entry.label);
        preds.push(*pred);
    }
    if let Some(id) = predictions.keys().find(|id| manifest.get(id).is_none()) {
        return Err(ScoreError::UnknownRecord(id.clone()));
    }
    Ok(challenge_score(&confusion(&truths, &preds)?))
}
