//! ROC analysis, threshold metrics and k-fold cross-validation.

mod cv;
mod folds;
mod metrics;
mod roc;

pub use self::cv::{cross_validate_features, CvInput, EvalReport, FoldMetrics, ThresholdMetrics};
pub use self::folds::{make_folds, make_folds_from, FoldMode, FoldPlan};
pub use self::metrics::{confusion_metrics, youden_threshold, Confusion};
pub use self::roc::{auc_mann_whitney, auc_trapezoid, roc_auc, roc_curve, RocCurve};

use crate::error::{Error, Result};

pub(crate) fn check_labels(scores: &[f64], labels: &[u8]) -> Result<(usize, usize)> {
    if scores.len() != labels.len() {
        return Err(Error::Shape(format!(
            "{} scores for {} labels",
            scores.len(),
            labels.len()
        )));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::InvalidArgument("non-finite score".into()));
    }
    let pos = labels.iter().filter(|&&l| l == 1).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::SingleClass);
    }
    Ok((pos, neg))
}
