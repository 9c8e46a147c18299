//! Deterministic feature maps and their 1×1 channel reduction.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::model::{CrbmModel, HiddenState};
use crate::data::Image2D;
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Hidden probabilities used as features.
pub fn extract_feature_map(model: &CrbmModel, img: &Image2D) -> Result<HiddenState> {
    model.hidden_probabilities(img)
}

/// How the 1×1 reduction weights are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReductionWeights {
    /// `1/M` on every map.
    Uniform,
    /// Seeded Gaussian direction normalized to unit length.
    RandomProjection,
}

impl ReductionWeights {
    pub fn weights(self, num_maps: usize, seed: u64) -> Vec<f64> {
        match self {
            ReductionWeights::Uniform => vec![1.0 / num_maps as f64; num_maps],
            ReductionWeights::RandomProjection => {
                let mut rng = rng_from_seed(seed);
                let w: Vec<f64> = (0..num_maps).map(|_| StandardNormal.sample(&mut rng)).collect();
                let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
                w.into_iter().map(|x| x / norm).collect()
            }
        }
    }
}

/// `out(i,j) = Σ_m weights_m · maps_m(i,j)`, returned row-major.
pub fn reduce_1x1(maps: &HiddenState, weights: &[f64]) -> Result<Vec<f64>> {
    if weights.len() != maps.num_maps {
        return Err(Error::Shape(format!(
            "{} reduction weights for {} maps",
            weights.len(),
            maps.num_maps
        )));
    }
    let len = maps.side * maps.side;
    let mut out = vec![0.0; len];
    for (m, &w) in weights.iter().enumerate() {
        for (o, &x) in out.iter_mut().zip(maps.map(m)) {
            *o += w * x;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crbm::model::HiddenKind;

    fn two_constant_maps() -> HiddenState {
        let mut h = HiddenState::zeros(2, 3, HiddenKind::Probabilities);
        h.values[..9].fill(0.2);
        h.values[9..].fill(0.8);
        h
    }

    #[test]
    fn uniform_is_mean() {
        let out = reduce_1x1(&two_constant_maps(), &ReductionWeights::Uniform.weights(2, 0)).unwrap();
        assert!(out.iter().all(|&x| (x - 0.5).abs() < 1e-15));
    }

    #[test]
    fn one_hot_selects() {
        let h = two_constant_maps();
        assert_eq!(reduce_1x1(&h, &[0.0, 1.0]).unwrap(), h.map(1));
        assert!(reduce_1x1(&h, &[1.0]).is_err());
    }

    #[test]
    fn projection_is_unit_norm_and_seeded() {
        let a = ReductionWeights::RandomProjection.weights(64, 3);
        assert!((a.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(a, ReductionWeights::RandomProjection.weights(64, 3));
        assert_ne!(a, ReductionWeights::RandomProjection.weights(64, 4));
    }

    #[test]
    fn reference_geometry() {
        let m = CrbmModel::zeros(64, 5, 32).unwrap();
        let img = Image2D::filled(32, 32, 0.5).unwrap();
        assert_eq!(extract_feature_map(&m, &img).unwrap().shape(), (28, 28, 64));
        assert!(extract_feature_map(&m, &Image2D::filled(31, 31, 0.5).unwrap()).is_err());
    }
}
