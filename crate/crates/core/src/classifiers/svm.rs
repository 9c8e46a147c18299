use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{check_finite, check_width, dot};
use crate::error::{Error, Result};
use crate::matrix::FeatureMatrix;
use crate::rng::derived_rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SvmConfig {
    pub c: f64,
    pub epochs: usize,
    /// Initial step of the decaying schedule `eta0 / (1 + eta0·λ·t)`.
    pub eta0: f64,
}

impl Default for SvmConfig {
    fn default() -> Self {
        Self {
            c: 1.0,
            epochs: 200,
            eta0: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub c: f64,
}

/// `(1/2)‖w‖² + C Σ max(0, 1 - y(x·w + b))`.
pub fn svm_objective(model: &SvmModel, x: &FeatureMatrix, y: &[f64]) -> f64 {
    let hinge: f64 = x
        .rows()
        .zip(y)
        .map(|(r, &yi)| (1.0 - yi * (dot(&model.weights, r) + model.bias)).max(0.0))
        .sum();
    0.5 * dot(&model.weights, &model.weights) + model.c * hinge
}

pub fn svm_fit(x: &FeatureMatrix, y: &[f64], cfg: &SvmConfig, seed: u64) -> Result<SvmModel> {
    svm_fit_with_history(x, y, cfg, seed).map(|(m, _)| m)
}

/// Stochastic subgradient descent on the primal; the per-sample objective is
/// `(λ/2)‖w‖² + hinge` with `λ = 1/(C n)`, which has the same minimizer.
/// Returns the objective after every epoch.
pub fn svm_fit_with_history(
    x: &FeatureMatrix,
    y: &[f64],
    cfg: &SvmConfig,
    seed: u64,
) -> Result<(SvmModel, Vec<f64>)> {
    let n = x.n_rows();
    if y.len() != n {
        return Err(Error::Shape(format!("{} labels for {n} rows", y.len())));
    }
    if y.iter().any(|&v| v != 1.0 && v != -1.0) {
        return Err(Error::InvalidArgument("SVM labels must be -1 or +1".into()));
    }
    if y.iter().all(|&v| v == y[0]) {
        return Err(Error::SingleClass);
    }
    if !(cfg.c > 0.0) {
        return Err(Error::Config("svm: C must be > 0".into()));
    }
    check_finite(x)?;

    let lambda = 1.0 / (cfg.c * n as f64);
    let mut model = SvmModel {
        weights: vec![0.0; x.n_cols()],
        bias: 0.0,
        c: cfg.c,
    };
    let mut order: Vec<usize> = (0..n).collect();
    let mut history = Vec::with_capacity(cfg.epochs);
    let mut t = 0usize;
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut derived_rng(seed, "svm-epoch", epoch as u64));
        for &i in &order {
            let eta = cfg.eta0 / (1.0 + cfg.eta0 * lambda * t as f64);
            let row = x.row(i);
            let margin = y[i] * (dot(&model.weights, row) + model.bias);
            let shrink = (1.0 - eta * lambda).max(0.0);
            model.weights.iter_mut().for_each(|w| *w *= shrink);
            if margin < 1.0 {
                for (w, &xi) in model.weights.iter_mut().zip(row) {
                    *w += eta * y[i] * xi;
                }
                model.bias += eta * y[i];
            }
            t += 1;
        }
        history.push(svm_objective(&model, x, y));
    }
    Ok((model, history))
}

/// Raw margins `x·w + b`.
pub fn svm_decision(model: &SvmModel, x: &FeatureMatrix) -> Result<Vec<f64>> {
    check_width(x, model.weights.len())?;
    Ok(x.rows().map(|r| dot(&model.weights, r) + model.bias).collect())
}
