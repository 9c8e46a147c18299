use rand::RngCore;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::conv;
use crate::data::Image2D;
use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, Rng};
use crate::{sigmoid, softplus};

/// Binary convolutional RBM with `num_filters` square filters of side
/// `kernel_size` over a square visible layer of side `input_size`.
///
/// All visible pixels share the bias `visible_bias`; feature map `m` has its
/// own bias `hidden_biases[m]`. Filters are stored row-major, one after the
/// other.
#[derive(Debug, Clone, PartialEq)]
pub struct CrbmModel {
    num_filters: usize,
    kernel_size: usize,
    input_size: usize,
    pub visible_bias: f64,
    pub hidden_biases: Vec<f64>,
    pub filters: Vec<f64>,
}

/// Whether a [`HiddenState`] holds probabilities or sampled bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HiddenKind {
    Probabilities,
    Samples,
}

/// `num_maps` feature maps of side `side`, map-major then row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HiddenState {
    pub num_maps: usize,
    pub side: usize,
    pub values: Vec<f64>,
    pub kind: HiddenKind,
}

impl HiddenState {
    pub fn zeros(num_maps: usize, side: usize, kind: HiddenKind) -> Self {
        Self {
            num_maps,
            side,
            values: vec![0.0; num_maps * side * side],
            kind,
        }
    }

    pub fn map(&self, m: usize) -> &[f64] {
        let len = self.side * self.side;
        &self.values[m * len..(m + 1) * len]
    }

    /// `(side, side, num_maps)`, the feature tensor shape.
    pub fn shape(&self) -> (usize, usize, usize) {
        (self.side, self.side, self.num_maps)
    }

    fn validate(&self) -> Result<()> {
        let ok = match self.kind {
            HiddenKind::Probabilities => self.values.iter().all(|v| (0.0..=1.0).contains(v)),
            HiddenKind::Samples => self.values.iter().all(|&v| v == 0.0 || v == 1.0),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "hidden state values do not respect kind {:?}",
                self.kind
            )))
        }
    }
}

/// Output of [`CrbmModel::gibbs_chain`].
#[derive(Debug, Clone)]
pub struct GibbsOutput {
    /// Visible sample after `k` rounds.
    pub visible: Image2D,
    /// `P(h | v^0)`.
    pub hidden_initial: HiddenState,
    /// `P(h | v^k)`.
    pub hidden_final: HiddenState,
    /// `P(v | h^0)`, the first-round reconstruction.
    pub reconstruction: Vec<f64>,
    pub hidden_draws: usize,
    pub visible_draws: usize,
}

impl CrbmModel {
    /// Zero-parameter model.
    pub fn zeros(num_filters: usize, kernel_size: usize, input_size: usize) -> Result<Self> {
        if num_filters == 0 || kernel_size == 0 {
            return Err(Error::InvalidArgument(
                "num_filters and kernel_size must be >= 1".into(),
            ));
        }
        if input_size < kernel_size {
            return Err(Error::Shape(format!(
                "input size {input_size} smaller than kernel {kernel_size}"
            )));
        }
        Ok(Self {
            num_filters,
            kernel_size,
            input_size,
            visible_bias: 0.0,
            hidden_biases: vec![0.0; num_filters],
            filters: vec![0.0; num_filters * kernel_size * kernel_size],
        })
    }

    /// Filters drawn from `N(0, sigma²)`, biases zero.
    pub fn random(
        num_filters: usize,
        kernel_size: usize,
        input_size: usize,
        sigma: f64,
        seed: u64,
    ) -> Result<Self> {
        let mut model = Self::zeros(num_filters, kernel_size, input_size)?;
        let normal = Normal::new(0.0, sigma)
            .map_err(|e| Error::InvalidArgument(format!("weight init sigma {sigma}: {e}")))?;
        let mut rng = rng_from_seed(seed);
        for w in &mut model.filters {
            *w = normal.sample(&mut rng);
        }
        Ok(model)
    }

    /// Builds a model from explicit parameters.
    pub fn from_parameters(
        kernel_size: usize,
        input_size: usize,
        visible_bias: f64,
        hidden_biases: Vec<f64>,
        filters: Vec<f64>,
    ) -> Result<Self> {
        let mut model = Self::zeros(hidden_biases.len(), kernel_size, input_size)?;
        if filters.len() != hidden_biases.len() * kernel_size * kernel_size {
            return Err(Error::Shape(format!(
                "{} filter weights for {} filters of size {kernel_size}",
                filters.len(),
                hidden_biases.len()
            )));
        }
        model.visible_bias = visible_bias;
        model.hidden_biases = hidden_biases;
        model.filters = filters;
        if !model.is_finite() {
            return Err(Error::InvalidArgument("non-finite model parameter".into()));
        }
        Ok(model)
    }

    pub fn num_filters(&self) -> usize {
        self.num_filters
    }

    pub fn kernel_size(&self) -> usize {
        self.kernel_size
    }

    pub fn input_size(&self) -> usize {
        self.input_size
    }

    /// Side of each hidden map, `N - K + 1`.
    pub fn hidden_side(&self) -> usize {
        self.input_size - self.kernel_size + 1
    }

    pub fn num_visible(&self) -> usize {
        self.input_size * self.input_size
    }

    pub fn num_hidden(&self) -> usize {
        self.num_filters * self.hidden_side().pow(2)
    }

    pub fn filter(&self, m: usize) -> &[f64] {
        let kk = self.kernel_size * self.kernel_size;
        &self.filters[m * kk..(m + 1) * kk]
    }

    pub fn is_finite(&self) -> bool {
        self.visible_bias.is_finite()
            && self.hidden_biases.iter().all(|v| v.is_finite())
            && self.filters.iter().all(|v| v.is_finite())
    }

    pub(crate) fn check_visible(&self, v: &Image2D) -> Result<()> {
        if v.width() != self.input_size || v.height() != self.input_size {
            return Err(Error::Shape(format!(
                "visible layer {}x{} does not match model input {n}x{n}",
                v.width(),
                v.height(),
                n = self.input_size
            )));
        }
        Ok(())
    }

    fn check_hidden(&self, h: &HiddenState) -> Result<()> {
        if h.num_maps != self.num_filters
            || h.side != self.hidden_side()
            || h.values.len() != self.num_hidden()
        {
            return Err(Error::Shape(format!(
                "hidden state {}x{}x{} does not match model {}x{}x{}",
                h.side,
                h.side,
                h.num_maps,
                self.hidden_side(),
                self.hidden_side(),
                self.num_filters
            )));
        }
        Ok(())
    }

    /// Hidden pre-activations `(W_m ⋆ v)_ij + c_m`: valid cross-correlation
    /// with `W_m`, i.e. convolution with the flipped filter.
    pub(crate) fn hidden_activations(&self, v: &[f64]) -> Vec<f64> {
        let (n, k, h) = (self.input_size, self.kernel_size, self.hidden_side());
        let len = h * h;
        let mut out = vec![0.0; self.num_filters * len];
        for (m, map) in out.chunks_exact_mut(len).enumerate() {
            map.fill(self.hidden_biases[m]);
            conv::correlate_valid_acc(v, n, self.filter(m), k, map);
        }
        out
    }

    pub(crate) fn hidden_probs_raw(&self, v: &[f64]) -> Vec<f64> {
        let mut a = self.hidden_activations(v);
        a.iter_mut().for_each(|x| *x = sigmoid(*x));
        a
    }

    /// `P(h^m_ij = 1 | v) = sigm((W_m ⋆ v)_ij + c_m)` for every map and position.
    pub fn hidden_probabilities(&self, v: &Image2D) -> Result<HiddenState> {
        self.check_visible(v)?;
        Ok(HiddenState {
            num_maps: self.num_filters,
            side: self.hidden_side(),
            values: self.hidden_probs_raw(v.pixels()),
            kind: HiddenKind::Probabilities,
        })
    }

    pub(crate) fn visible_probs_raw(&self, hidden: &[f64]) -> Vec<f64> {
        let (n, k, h) = (self.input_size, self.kernel_size, self.hidden_side());
        let mut out = vec![self.visible_bias; n * n];
        for (m, map) in hidden.chunks_exact(h * h).enumerate() {
            conv::backproject_acc(map, h, self.filter(m), k, &mut out);
        }
        out.iter_mut().for_each(|x| *x = sigmoid(*x));
        out
    }

    /// `P(v_ij = 1 | h) = sigm(Σ_m (W_m * h^m)_ij + b)`, full convolution with
    /// the unflipped filters.
    pub fn visible_probabilities(&self, h: &HiddenState) -> Result<Image2D> {
        self.check_hidden(h)?;
        h.validate()?;
        Ok(Image2D::unchecked(
            self.input_size,
            self.input_size,
            self.visible_probs_raw(&h.values),
        ))
    }

    /// Runs `k` rounds of block Gibbs sampling from `v0`; each round draws a
    /// hidden sample from `P(h|v)` and then a visible sample from `P(v|h)`.
    pub fn gibbs_chain(&self, v0: &Image2D, k: usize, rng: &mut Rng) -> Result<GibbsOutput> {
        if k == 0 {
            return Err(Error::InvalidArgument("Gibbs chain length must be >= 1".into()));
        }
        self.check_visible(v0)?;
        let hidden_initial = self.hidden_probs_raw(v0.pixels());
        let mut hidden_probs = hidden_initial.clone();
        let mut visible = Vec::new();
        let mut reconstruction = Vec::new();
        for round in 0..k {
            let h = bernoulli_raw(&hidden_probs, rng);
            let vp = self.visible_probs_raw(&h);
            visible = bernoulli_raw(&vp, rng);
            if round == 0 {
                reconstruction = vp;
            }
            hidden_probs = self.hidden_probs_raw(&visible);
        }
        let (m, side) = (self.num_filters, self.hidden_side());
        let wrap = |values| HiddenState {
            num_maps: m,
            side,
            values,
            kind: HiddenKind::Probabilities,
        };
        Ok(GibbsOutput {
            visible: Image2D::unchecked(self.input_size, self.input_size, visible),
            hidden_initial: wrap(hidden_initial),
            hidden_final: wrap(hidden_probs),
            reconstruction,
            hidden_draws: k,
            visible_draws: k,
        })
    }

    /// `E(v,h) = -Σ_m Σ_ij h^m_ij (W_m ⋆ v)_ij - b Σ v - Σ_m c_m Σ_ij h^m_ij`.
    pub fn energy(&self, v: &Image2D, h: &HiddenState) -> Result<f64> {
        self.check_visible(v)?;
        self.check_hidden(h)?;
        if !v.is_binary() || !h.values.iter().all(|&x| x == 0.0 || x == 1.0) {
            return Err(Error::InvalidArgument("energy requires binary v and h".into()));
        }
        let act = self.hidden_activations(v.pixels());
        let coupling: f64 = act.iter().zip(&h.values).map(|(a, h)| a * h).sum();
        Ok(-coupling - self.visible_bias * v.pixels().iter().sum::<f64>())
    }

    /// Free energy with the hidden layer summed out:
    /// `F(v) = -b Σ v - Σ_m Σ_ij softplus((W_m ⋆ v)_ij + c_m)`.
    pub fn free_energy(&self, v: &Image2D) -> Result<f64> {
        self.check_visible(v)?;
        Ok(self.free_energy_raw(v.pixels()))
    }

    pub(crate) fn free_energy_raw(&self, v: &[f64]) -> f64 {
        let act = self.hidden_activations(v);
        -self.visible_bias * v.iter().sum::<f64>() - act.iter().map(|&a| softplus(a)).sum::<f64>()
    }
}

pub(crate) fn bernoulli_raw(probs: &[f64], rng: &mut Rng) -> Vec<f64> {
    probs
        .iter()
        .map(|&p| {
            // 53-bit uniform in [0, 1)
            let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            if u < p {
                1.0
            } else {
                0.0
            }
        })
        .collect()
}

/// Independent Bernoulli draws, one per probability.
pub fn sample_bernoulli(probs: &[f64], rng: &mut Rng) -> Result<Vec<f64>> {
    if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::InvalidArgument(format!("probability {p} outside [0, 1]")));
    }
    Ok(bernoulli_raw(probs, rng))
}

/// Samples a hidden state from a probability state.
pub fn sample_hidden(h: &HiddenState, rng: &mut Rng) -> Result<HiddenState> {
    Ok(HiddenState {
        values: sample_bernoulli(&h.values, rng)?,
        kind: HiddenKind::Samples,
        ..h.clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    #[test]
    fn zero_model_gives_half() {
        let m = CrbmModel::zeros(3, 2, 4).unwrap();
        let v = Image2D::from_fn(4, 4, |r, c| ((r + c) % 2) as f64).unwrap();
        let h = m.hidden_probabilities(&v).unwrap();
        assert_eq!(h.shape(), (3, 3, 3));
        assert!(h.values.iter().all(|&p| p == 0.5));
        let vp = m.visible_probabilities(&h).unwrap();
        assert!(vp.pixels().iter().all(|&p| p == 0.5));
    }

    #[test]
    fn all_ones_filter_activation() {
        let m = CrbmModel::from_parameters(2, 3, 0.0, vec![0.0], vec![1.0; 4]).unwrap();
        let v = Image2D::filled(3, 3, 1.0).unwrap();
        let h = m.hidden_probabilities(&v).unwrap();
        for &p in &h.values {
            assert!((p - 0.98201).abs() < 1e-5);
        }
    }

    #[test]
    fn bias_only_visible() {
        let mut m = CrbmModel::zeros(2, 3, 5).unwrap();
        m.visible_bias = -2.0;
        m.filters.iter_mut().for_each(|w| *w = 0.7);
        let h = HiddenState::zeros(2, 3, HiddenKind::Samples);
        let vp = m.visible_probabilities(&h).unwrap();
        assert!(vp.pixels().iter().all(|&p| (p - 0.11920).abs() < 1e-5));
    }

    #[test]
    fn single_hidden_unit_spreads_to_its_window() {
        let k = 3;
        let w: Vec<f64> = (0..9).map(|i| i as f64 * 0.1 - 0.4).collect();
        let m = CrbmModel::from_parameters(k, 6, -0.3, vec![0.0], w.clone()).unwrap();
        let mut h = HiddenState::zeros(1, 4, HiddenKind::Samples);
        h.values[0] = 1.0;
        let vp = m.visible_probabilities(&h).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let expect = if i < k && j < k {
                    sigmoid(w[i * k + j] - 0.3)
                } else {
                    sigmoid(-0.3)
                };
                assert!((vp.get(i, j) - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn shape_law() {
        for n in 1..12 {
            for k in 1..=n {
                let m = CrbmModel::zeros(1, k, n).unwrap();
                let v = Image2D::filled(n, n, 0.0).unwrap();
                assert_eq!(m.hidden_probabilities(&v).unwrap().side, n - k + 1);
            }
        }
        assert!(CrbmModel::zeros(1, 5, 4).is_err());
    }

    #[test]
    fn dimension_errors() {
        let m = CrbmModel::zeros(2, 2, 4).unwrap();
        let v = Image2D::filled(5, 5, 0.0).unwrap();
        assert!(matches!(m.hidden_probabilities(&v), Err(Error::Shape(_))));
        let h = HiddenState::zeros(2, 2, HiddenKind::Probabilities);
        assert!(matches!(m.visible_probabilities(&h), Err(Error::Shape(_))));
    }

    #[test]
    fn bernoulli_extremes_and_mean() {
        let mut rng = rng_from_seed(11);
        assert!(sample_bernoulli(&[0.0; 100], &mut rng).unwrap().iter().all(|&x| x == 0.0));
        assert!(sample_bernoulli(&[1.0; 100], &mut rng).unwrap().iter().all(|&x| x == 1.0));
        let draws = sample_bernoulli(&vec![0.5; 10_000], &mut rng).unwrap();
        let mean = draws.iter().sum::<f64>() / 10_000.0;
        assert!((mean - 0.5).abs() < 0.02, "mean {mean}");
        assert!(sample_bernoulli(&[1.5], &mut rng).is_err());
        assert!(sample_bernoulli(&[-0.1], &mut rng).is_err());
    }

    #[test]
    fn gibbs_is_deterministic_and_counts_draws() {
        let m = CrbmModel::random(2, 3, 6, 0.5, 3).unwrap();
        let v0 = Image2D::from_fn(6, 6, |r, c| ((r * c) % 2) as f64).unwrap();
        let a = m.gibbs_chain(&v0, 1, &mut rng_from_seed(5)).unwrap();
        assert_eq!((a.hidden_draws, a.visible_draws), (1, 1));
        let b = m.gibbs_chain(&v0, 3, &mut rng_from_seed(5)).unwrap();
        let c = m.gibbs_chain(&v0, 3, &mut rng_from_seed(5)).unwrap();
        assert_eq!(b.visible, c.visible);
        assert!(b.visible.is_binary());
        assert!(m.gibbs_chain(&v0, 0, &mut rng_from_seed(5)).is_err());
    }

    #[test]
    fn zero_weight_chain_factorizes() {
        let mut m = CrbmModel::zeros(1, 2, 20).unwrap();
        m.visible_bias = 1.0;
        let v0 = Image2D::filled(20, 20, 0.0).unwrap();
        let mut rng = rng_from_seed(1);
        let mut ones = 0.0;
        for _ in 0..25 {
            ones += m.gibbs_chain(&v0, 2, &mut rng).unwrap().visible.pixels().iter().sum::<f64>();
        }
        let mean = ones / (25.0 * 400.0);
        // sigm(1) ≈ 0.731; 10000 draws give a standard error of ≈ 0.0044.
        assert!((mean - sigmoid(1.0)).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn energy_special_cases() {
        let zero = CrbmModel::zeros(2, 2, 3).unwrap();
        let v = Image2D::from_fn(3, 3, |r, _| (r % 2) as f64).unwrap();
        let mut h = HiddenState::zeros(2, 2, HiddenKind::Samples);
        h.values[1] = 1.0;
        h.values[6] = 1.0;
        assert_eq!(zero.energy(&v, &h).unwrap(), 0.0);

        let mut m = CrbmModel::random(2, 2, 3, 1.0, 9).unwrap();
        m.hidden_biases = vec![0.3, -1.2];
        let v0 = Image2D::filled(3, 3, 0.0).unwrap();
        let e = m.energy(&v0, &h).unwrap();
        assert!((e - -(0.3 - 1.2)).abs() < 1e-15);

        let soft = Image2D::filled(3, 3, 0.5).unwrap();
        assert!(m.energy(&soft, &h).is_err());
    }

    #[test]
    fn free_energy_of_zero_model() {
        let m = CrbmModel::zeros(2, 2, 3).unwrap();
        let v = Image2D::from_fn(3, 3, |r, c| ((r + c) % 2) as f64).unwrap();
        let f = m.free_energy(&v).unwrap();
        assert!((f + 8.0 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn free_energy_decreases_with_hidden_bias() {
        let mut m = CrbmModel::random(2, 2, 4, 0.8, 4).unwrap();
        let v = Image2D::from_fn(4, 4, |r, c| ((r * 3 + c) % 2) as f64).unwrap();
        let f0 = m.free_energy(&v).unwrap();
        m.hidden_biases[1] += 0.5;
        assert!(m.free_energy(&v).unwrap() < f0);
    }
}
