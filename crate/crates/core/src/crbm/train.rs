//! Contrastive-divergence training.

use rand::seq::SliceRandom;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::conv;
use super::model::CrbmModel;
use crate::data::{binarize, Image2D};
use crate::error::{Error, Result};
use crate::rng::{derived_rng, rng_from_seed, Rng};

/// How training images enter the visible layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VisibleMode {
    /// Pixel intensities in `[0, 1]` are used directly as `v^0`.
    Real,
    /// Pixels are thresholded at `binary_threshold`.
    Binary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CrbmTrainConfig {
    pub learning_rate: f64,
    pub cd_steps: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub rng_seed: u64,
    pub weight_init_sigma: f64,
    pub visible_mode: VisibleMode,
    pub binary_threshold: f64,
}

impl Default for CrbmTrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-4,
            cd_steps: 1,
            epochs: 30,
            batch_size: 16,
            rng_seed: 0,
            weight_init_sigma: 0.01,
            visible_mode: VisibleMode::Real,
            binary_threshold: 0.5,
        }
    }
}

impl CrbmTrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Config(format!("crbm: {what}")));
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be > 0");
        }
        if self.cd_steps == 0 {
            return bad("cd_steps must be >= 1");
        }
        if self.batch_size == 0 {
            return bad("batch_size must be >= 1");
        }
        if !(self.weight_init_sigma > 0.0 && self.weight_init_sigma.is_finite()) {
            return bad("weight_init_sigma must be > 0");
        }
        if !(self.binary_threshold > 0.0 && self.binary_threshold < 1.0) {
            return bad("binary_threshold must lie in (0, 1)");
        }
        Ok(())
    }

    /// Applies the visible mode to one image.
    pub fn prepare(&self, img: &Image2D) -> Result<Image2D> {
        match self.visible_mode {
            VisibleMode::Real => Ok(img.clone()),
            VisibleMode::Binary => binarize(img, self.binary_threshold),
        }
    }
}

/// Parameter-shaped quantities (gradients, sufficient statistics).
#[derive(Debug, Clone, PartialEq)]
pub struct CrbmGradient {
    pub filters: Vec<f64>,
    pub visible_bias: f64,
    pub hidden_biases: Vec<f64>,
}

impl CrbmGradient {
    pub fn zeros_like(model: &CrbmModel) -> Self {
        Self {
            filters: vec![0.0; model.filters.len()],
            visible_bias: 0.0,
            hidden_biases: vec![0.0; model.num_filters()],
        }
    }

    /// Flattened as `[filters..., visible_bias, hidden_biases...]`.
    pub fn flatten(&self) -> Vec<f64> {
        let mut v = self.filters.clone();
        v.push(self.visible_bias);
        v.extend_from_slice(&self.hidden_biases);
        v
    }

    pub fn add_scaled(&mut self, other: &CrbmGradient, scale: f64) {
        for (a, b) in self.filters.iter_mut().zip(&other.filters) {
            *a += scale * b;
        }
        self.visible_bias += scale * other.visible_bias;
        for (a, b) in self.hidden_biases.iter_mut().zip(&other.hidden_biases) {
            *a += scale * b;
        }
    }

    pub fn scale(&mut self, s: f64) {
        self.filters.iter_mut().for_each(|x| *x *= s);
        self.visible_bias *= s;
        self.hidden_biases.iter_mut().for_each(|x| *x *= s);
    }
}

/// `-∂F/∂θ` at `v` given `P(h|v)`: filter correlations, pixel sum and
/// per-map hidden sums.
pub(crate) fn sufficient_statistics(model: &CrbmModel, v: &[f64], hidden_probs: &[f64]) -> CrbmGradient {
    let (n, k) = (model.input_size(), model.kernel_size());
    let len = model.hidden_side().pow(2);
    let kk = k * k;
    let mut g = CrbmGradient::zeros_like(model);
    for (m, map) in hidden_probs.chunks_exact(len).enumerate() {
        conv::filter_gradient_acc(v, n, map, k, &mut g.filters[m * kk..(m + 1) * kk]);
        g.hidden_biases[m] = map.iter().sum();
    }
    g.visible_bias = v.iter().sum();
    g
}

/// Per-image CD-k estimate of the log-likelihood gradient in sum form:
/// positive statistics at `v^0` minus negative statistics at `v^k`, both
/// using hidden probabilities.
pub fn cd_gradient(model: &CrbmModel, v0: &Image2D, k: usize, rng: &mut Rng) -> Result<(CrbmGradient, f64)> {
    let chain = model.gibbs_chain(v0, k, rng)?;
    let mut g = sufficient_statistics(model, v0.pixels(), &chain.hidden_initial.values);
    let neg = sufficient_statistics(model, chain.visible.pixels(), &chain.hidden_final.values);
    g.add_scaled(&neg, -1.0);
    Ok((g, reconstruction_cross_entropy(v0.pixels(), &chain.reconstruction)))
}

/// Mean per-pixel binary cross-entropy between `v` and reconstruction probabilities.
pub fn reconstruction_cross_entropy(v: &[f64], probs: &[f64]) -> f64 {
    const EPS: f64 = 1e-12;
    let total: f64 = v
        .iter()
        .zip(probs)
        .map(|(&x, &p)| {
            let p = p.clamp(EPS, 1.0 - EPS);
            -(x * p.ln() + (1.0 - x) * (1.0 - p).ln())
        })
        .sum();
    total / v.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatchStats {
    pub reconstruction_cross_entropy: f64,
    pub mean_abs_delta_w: f64,
}

/// One CD-k parameter update from a batch.
///
/// Per image the update direction is
/// `ΔW_m = corr(v^0, P(h^m|v^0)) - corr(v^k, P(h^m|v^k))`,
/// `Δb = mean(v^0 - v^k)` and `Δc_m = mean over positions of P(h^m|v^0) - P(h^m|v^k)`;
/// directions are averaged over the batch, scaled by the learning rate and
/// applied once. Each image draws its chain from its own stream seeded off `rng`.
pub fn cd_update(
    model: &CrbmModel,
    batch: &[Image2D],
    cfg: &CrbmTrainConfig,
    rng: &mut Rng,
) -> Result<(CrbmModel, BatchStats)> {
    if batch.is_empty() {
        return Err(Error::Empty("CD batch".into()));
    }
    let seeds: Vec<u64> = batch.iter().map(|_| rng.next_u64()).collect();
    let per_image = batch
        .iter()
        .zip(&seeds)
        .map(|(v, &s)| cd_gradient(model, v, cfg.cd_steps, &mut rng_from_seed(s)))
        .collect::<Result<Vec<_>>>()?;

    let n_v = model.num_visible() as f64;
    let n_h = model.hidden_side().pow(2) as f64;
    let mut delta = CrbmGradient::zeros_like(model);
    let mut ce = 0.0;
    for (g, c) in &per_image {
        delta.add_scaled(g, 1.0);
        ce += c;
    }
    let scale = cfg.learning_rate / batch.len() as f64;
    delta.filters.iter_mut().for_each(|x| *x *= scale);
    delta.visible_bias *= scale / n_v;
    delta.hidden_biases.iter_mut().for_each(|x| *x *= scale / n_h);

    let mut next = model.clone();
    for (w, d) in next.filters.iter_mut().zip(&delta.filters) {
        *w += d;
    }
    next.visible_bias += delta.visible_bias;
    for (c, d) in next.hidden_biases.iter_mut().zip(&delta.hidden_biases) {
        *c += d;
    }
    let mean_abs_delta_w =
        delta.filters.iter().map(|d| d.abs()).sum::<f64>() / delta.filters.len() as f64;
    Ok((
        next,
        BatchStats {
            reconstruction_cross_entropy: ce / batch.len() as f64,
            mean_abs_delta_w,
        },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub reconstruction_cross_entropy: f64,
    pub mean_abs_delta_w: f64,
}

/// One entry per completed epoch.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainHistory {
    pub epochs: Vec<EpochStats>,
}

impl TrainHistory {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("epoch,reconstruction_cross_entropy,mean_abs_delta_w\n");
        for e in &self.epochs {
            s.push_str(&format!(
                "{},{},{}\n",
                e.epoch, e.reconstruction_cross_entropy, e.mean_abs_delta_w
            ));
        }
        s
    }
}

/// Trains for `cfg.epochs` passes over `data` in seeded, shuffled batches.
pub fn train(model: &CrbmModel, data: &[Image2D], cfg: &CrbmTrainConfig) -> Result<(CrbmModel, TrainHistory)> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(Error::Empty("CRBM training data".into()));
    }
    let prepared = data
        .iter()
        .map(|img| {
            model.check_visible(img)?;
            cfg.prepare(img)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut model = model.clone();
    let mut history = TrainHistory::default();
    let mut order: Vec<usize> = (0..prepared.len()).collect();
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut derived_rng(cfg.rng_seed, "crbm-shuffle", epoch as u64));
        let mut ce = 0.0;
        let mut dw = 0.0;
        let n_batches = order.len().div_ceil(cfg.batch_size);
        for (b, idx) in order.chunks(cfg.batch_size).enumerate() {
            let batch: Vec<Image2D> = idx.iter().map(|&i| prepared[i].clone()).collect();
            let mut rng = derived_rng(cfg.rng_seed, "crbm-batch", (epoch * n_batches + b) as u64);
            let (next, stats) = cd_update(&model, &batch, cfg, &mut rng)?;
            if !next.is_finite() {
                return Err(Error::NonFinite { epoch, batch: b });
            }
            model = next;
            ce += stats.reconstruction_cross_entropy * idx.len() as f64;
            dw += stats.mean_abs_delta_w;
        }
        let stats = EpochStats {
            epoch,
            reconstruction_cross_entropy: ce / prepared.len() as f64,
            mean_abs_delta_w: dw / n_batches as f64,
        };
        log::debug!(
            "crbm epoch {epoch}: reconstruction CE {:.5}, mean |dW| {:.3e}",
            stats.reconstruction_cross_entropy,
            stats.mean_abs_delta_w
        );
        history.epochs.push(stats);
    }
    Ok((model, history))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crbm::model::HiddenKind;

    #[test]
    fn fixed_point_gives_zero_update() {
        // With every filter weight and the visible bias strongly saturated, the
        // chain reproduces an all-ones image with certainty.
        let mut m = CrbmModel::zeros(1, 2, 3).unwrap();
        m.filters = vec![40.0; 4];
        m.hidden_biases = vec![0.0];
        m.visible_bias = 40.0;
        let v = Image2D::filled(3, 3, 1.0).unwrap();
        let cfg = CrbmTrainConfig {
            learning_rate: 0.1,
            ..Default::default()
        };
        let (next, _) = cd_update(&m, &[v], &cfg, &mut rng_from_seed(0)).unwrap();
        assert_eq!(next, m);
    }

    #[test]
    fn zero_image_pushes_visible_bias_down() {
        let cfg = CrbmTrainConfig {
            learning_rate: 0.1,
            ..Default::default()
        };
        let m = CrbmModel::zeros(2, 3, 6).unwrap();
        let v = Image2D::filled(6, 6, 0.0).unwrap();
        let mut total = 0.0;
        for seed in 0..20 {
            let (next, _) = cd_update(&m, &[v.clone()], &cfg, &mut rng_from_seed(seed)).unwrap();
            assert!(next.visible_bias <= 0.0);
            total += next.visible_bias;
        }
        assert!(total < 0.0);
    }

    #[test]
    fn empty_inputs_rejected() {
        let m = CrbmModel::zeros(1, 2, 3).unwrap();
        let cfg = CrbmTrainConfig::default();
        assert!(matches!(cd_update(&m, &[], &cfg, &mut rng_from_seed(0)), Err(Error::Empty(_))));
        assert!(matches!(train(&m, &[], &cfg), Err(Error::Empty(_))));
    }

    #[test]
    fn zero_epochs_is_identity() {
        let m = CrbmModel::random(2, 2, 4, 0.1, 1).unwrap();
        let data = vec![Image2D::filled(4, 4, 0.3).unwrap()];
        let cfg = CrbmTrainConfig {
            epochs: 0,
            ..Default::default()
        };
        let (out, hist) = train(&m, &data, &cfg).unwrap();
        assert_eq!(out, m);
        assert!(hist.epochs.is_empty());
    }

    #[test]
    fn divergence_is_reported() {
        let m = CrbmModel::random(2, 2, 4, 0.1, 1).unwrap();
        let data = vec![Image2D::filled(4, 4, 1.0).unwrap(); 4];
        let cfg = CrbmTrainConfig {
            learning_rate: f64::MAX,
            epochs: 3,
            batch_size: 2,
            ..Default::default()
        };
        let r = train(&m, &data, &cfg);
        assert!(matches!(r, Err(Error::NonFinite { .. })), "{r:?}");
    }

    #[test]
    fn statistics_are_parameter_shaped() {
        let m = CrbmModel::random(3, 2, 5, 0.3, 2).unwrap();
        let v = Image2D::from_fn(5, 5, |r, c| ((r + 2 * c) % 3 == 0) as u8 as f64).unwrap();
        let h = m.hidden_probabilities(&v).unwrap();
        assert_eq!(h.kind, HiddenKind::Probabilities);
        let g = sufficient_statistics(&m, v.pixels(), &h.values);
        assert_eq!(g.flatten().len(), 3 * 4 + 1 + 3);
        assert_eq!(g.visible_bias, v.pixels().iter().sum::<f64>());
    }

    #[test]
    fn invalid_config_rejected() {
        let bad = CrbmTrainConfig {
            cd_steps: 0,
            ..Default::default()
        };
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
    }
}
