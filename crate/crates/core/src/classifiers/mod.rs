//! Prediction heads: logistic regression, linear SVM and random forest.
//! Each exposes a continuous score suitable for ROC analysis.

mod forest;
mod logistic;
mod svm;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::FeatureMatrix;

pub use self::forest::{rf_fit, rf_predict_proba, Node, RfConfig, RfModel, Tree};
pub use self::logistic::{lr_fit, lr_loss_and_gradient, lr_predict_proba, LrConfig, LrModel};
pub use self::svm::{svm_decision, svm_fit, svm_fit_with_history, svm_objective, SvmConfig, SvmModel};

/// Head selection with hyperparameters, as written in configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ClassifierConfig {
    Lr(LrConfig),
    Svm(SvmConfig),
    Rf(RfConfig),
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig::Lr(LrConfig::default())
    }
}

impl ClassifierConfig {
    pub fn name(&self) -> &'static str {
        match self {
            ClassifierConfig::Lr(_) => "lr",
            ClassifierConfig::Svm(_) => "svm",
            ClassifierConfig::Rf(_) => "rf",
        }
    }

    /// Fits the head; `seed` drives SVM shuffling and RF bootstraps.
    pub fn fit(&self, x: &FeatureMatrix, labels: &[u8], seed: u64) -> Result<FittedClassifier> {
        Ok(match self {
            ClassifierConfig::Lr(cfg) => FittedClassifier::Lr(lr_fit(x, labels, cfg)?),
            ClassifierConfig::Svm(cfg) => {
                let y: Vec<f64> = labels.iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect();
                FittedClassifier::Svm(svm_fit(x, &y, cfg, seed)?)
            }
            ClassifierConfig::Rf(cfg) => FittedClassifier::Rf(rf_fit(x, labels, cfg, seed)?),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FittedClassifier {
    Lr(LrModel),
    Svm(SvmModel),
    Rf(RfModel),
}

impl FittedClassifier {
    /// Probabilities for LR/RF, raw margins for the SVM.
    pub fn score(&self, x: &FeatureMatrix) -> Result<Vec<f64>> {
        match self {
            FittedClassifier::Lr(m) => lr_predict_proba(m, x),
            FittedClassifier::Svm(m) => svm_decision(m, x),
            FittedClassifier::Rf(m) => rf_predict_proba(m, x),
        }
    }

    /// 0.5 on probabilities, 0 on margins.
    pub fn default_threshold(&self) -> f64 {
        match self {
            FittedClassifier::Svm(_) => 0.0,
            _ => 0.5,
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("classifier serializes");
        s.push('\n');
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

pub(crate) fn check_binary(labels: &[u8], n: usize) -> Result<()> {
    if labels.len() != n {
        return Err(Error::Shape(format!("{} labels for {n} rows", labels.len())));
    }
    if let Some(l) = labels.iter().find(|&&l| l > 1) {
        return Err(Error::InvalidArgument(format!("label {l} outside {{0,1}}")));
    }
    let pos = labels.iter().filter(|&&l| l == 1).count();
    if pos == 0 || pos == n {
        return Err(Error::SingleClass);
    }
    Ok(())
}

pub(crate) fn check_width(x: &FeatureMatrix, width: usize) -> Result<()> {
    if x.n_cols() != width {
        return Err(Error::Shape(format!(
            "{} feature columns, model expects {width}",
            x.n_cols()
        )));
    }
    Ok(())
}

pub(crate) fn check_finite(x: &FeatureMatrix) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::InvalidArgument("non-finite feature value".into()));
    }
    Ok(())
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
