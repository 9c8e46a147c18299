use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Threshold metrics; a rate whose denominator is zero is reported as 0 and
/// flagged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Confusion {
    pub threshold: f64,
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub accuracy: f64,
    pub sensitivity: f64,
    pub specificity: f64,
    pub sensitivity_undefined: bool,
    pub specificity_undefined: bool,
}

fn rate(num: usize, den: usize) -> (f64, bool) {
    if den == 0 {
        (0.0, true)
    } else {
        (num as f64 / den as f64, false)
    }
}

/// Predict positive iff `score >= threshold`.
pub fn confusion_metrics(scores: &[f64], labels: &[u8], threshold: f64) -> Result<Confusion> {
    if scores.len() != labels.len() {
        return Err(Error::Shape(format!(
            "{} scores for {} labels",
            scores.len(),
            labels.len()
        )));
    }
    let (mut tp, mut fp, mut tn, mut fn_) = (0, 0, 0, 0);
    for (&s, &l) in scores.iter().zip(labels) {
        match (s >= threshold, l == 1) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, false) => tn += 1,
            (false, true) => fn_ += 1,
        }
    }
    let (sensitivity, sensitivity_undefined) = rate(tp, tp + fn_);
    let (specificity, specificity_undefined) = rate(tn, tn + fp);
    let (accuracy, _) = rate(tp + tn, scores.len());
    Ok(Confusion {
        threshold,
        tp,
        fp,
        tn,
        fn_,
        accuracy,
        sensitivity,
        specificity,
        sensitivity_undefined,
        specificity_undefined,
    })
}

/// Cutoff among the observed scores maximizing `sensitivity + specificity - 1`;
/// ties go to the higher cutoff.
pub fn youden_threshold(scores: &[f64], labels: &[u8]) -> Result<Confusion> {
    let curve = super::roc_curve(scores, labels)?;
    let mut best = (f64::NEG_INFINITY, f64::INFINITY);
    for (&(fpr, tpr), &t) in curve.points.iter().zip(&curve.thresholds).skip(1) {
        let j = tpr - fpr;
        if j > best.0 {
            best = (j, t);
        }
    }
    confusion_metrics(scores, labels, best.1)
}
