use serde::{Deserialize, Serialize};

use super::{check_binary, check_finite, check_width, dot};
use crate::error::Result;
use crate::matrix::FeatureMatrix;
use crate::sigmoid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LrConfig {
    pub l2: f64,
    pub steps: usize,
    pub step_size: f64,
    /// Stop once the gradient norm falls below this.
    pub tolerance: f64,
}

impl Default for LrConfig {
    fn default() -> Self {
        Self {
            l2: 1e-3,
            steps: 500,
            step_size: 0.5,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LrModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub l2: f64,
}

impl LrModel {
    pub fn zeros(width: usize, l2: f64) -> Self {
        Self {
            weights: vec![0.0; width],
            bias: 0.0,
            l2,
        }
    }
}

/// Mean cross-entropy plus `(l2/2)‖w‖²`, with its gradient as
/// `(∂/∂w, ∂/∂b)`.
pub fn lr_loss_and_gradient(model: &LrModel, x: &FeatureMatrix, labels: &[u8]) -> (f64, Vec<f64>, f64) {
    let n = x.n_rows() as f64;
    let mut loss = 0.0;
    let mut gw = vec![0.0; model.weights.len()];
    let mut gb = 0.0;
    for (row, &l) in x.rows().zip(labels) {
        let z = dot(&model.weights, row) + model.bias;
        let y = f64::from(l);
        // -[y log σ(z) + (1-y) log(1-σ(z))] = softplus(z) - y z
        loss += crate::softplus(z) - y * z;
        let r = sigmoid(z) - y;
        for (g, &xi) in gw.iter_mut().zip(row) {
            *g += r * xi;
        }
        gb += r;
    }
    loss /= n;
    gb /= n;
    for (g, &w) in gw.iter_mut().zip(&model.weights) {
        *g = *g / n + model.l2 * w;
    }
    loss += 0.5 * model.l2 * dot(&model.weights, &model.weights);
    (loss, gw, gb)
}

/// Full-batch gradient descent with a fixed step.
pub fn lr_fit(x: &FeatureMatrix, labels: &[u8], cfg: &LrConfig) -> Result<LrModel> {
    check_binary(labels, x.n_rows())?;
    check_finite(x)?;
    let mut model = LrModel::zeros(x.n_cols(), cfg.l2);
    for _ in 0..cfg.steps {
        let (_, gw, gb) = lr_loss_and_gradient(&model, x, labels);
        let norm = (dot(&gw, &gw) + gb * gb).sqrt();
        if norm < cfg.tolerance {
            break;
        }
        for (w, g) in model.weights.iter_mut().zip(&gw) {
            *w -= cfg.step_size * g;
        }
        model.bias -= cfg.step_size * gb;
    }
    Ok(model)
}

pub fn lr_predict_proba(model: &LrModel, x: &FeatureMatrix) -> Result<Vec<f64>> {
    check_width(x, model.weights.len())?;
    Ok(x.rows().map(|r| sigmoid(dot(&model.weights, r) + model.bias)).collect())
}
