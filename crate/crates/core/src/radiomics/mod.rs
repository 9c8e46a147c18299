//! Hand-crafted radiomic features over an ROI: first-order statistics,
//! shape descriptors, GLCM and GLRLM texture, and Haar-wavelet subbands.

mod catalog;
mod first_order;
mod glcm;
mod glrlm;
mod quantize;
mod shape;
mod wavelet;

use serde::{Deserialize, Serialize};

use crate::data::Image2D;
use crate::error::{Error, Result};

pub use self::catalog::{
    catalog_names, extract_all, RadiomicsConfig, CATALOG_LEN, DIRECTIONS, FIRST_ORDER_LEN,
    GLCM_LEN, GLRLM_LEN, SHAPE_LEN,
};
pub use self::first_order::first_order_features;
pub use self::glcm::{glcm_compute, glcm_features, Glcm};
pub use self::glrlm::{glrlm_compute, glrlm_features, Glrlm};
pub use self::quantize::{quantize, QuantizedImage};
pub use self::shape::shape_features;
pub use self::wavelet::{wavelet_decompose, wavelet_reconstruct, HaarSubbands, Plane};

/// Ordered, named feature values.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub names: Vec<String>,
    pub values: Vec<f64>,
}

impl FeatureVector {
    pub fn push(&mut self, name: impl Into<String>, value: f64) {
        self.names.push(name.into());
        self.values.push(value);
    }

    /// Appends `other` with every name prefixed by `prefix_`.
    pub fn extend_prefixed(&mut self, prefix: &str, other: FeatureVector) {
        self.names
            .extend(other.names.into_iter().map(|n| format!("{prefix}_{n}")));
        self.values.extend(other.values);
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.values[i])
    }
}

/// Read-only access to a row-major real raster; images and wavelet subbands
/// both implement it.
pub trait Raster {
    fn width(&self) -> usize;
    fn height(&self) -> usize;
    fn values(&self) -> &[f64];
}

impl Raster for Image2D {
    fn width(&self) -> usize {
        Image2D::width(self)
    }
    fn height(&self) -> usize {
        Image2D::height(self)
    }
    fn values(&self) -> &[f64] {
        self.pixels()
    }
}

pub(crate) fn in_roi_values<R: Raster + ?Sized>(img: &R, mask: &crate::data::RoiMask) -> Result<Vec<f64>> {
    if mask.width() != img.width() || mask.height() != img.height() {
        return Err(Error::Shape(format!(
            "mask {}x{} vs raster {}x{}",
            mask.width(),
            mask.height(),
            img.width(),
            img.height()
        )));
    }
    let vals: Vec<f64> = img
        .values()
        .iter()
        .zip(mask.bits())
        .filter_map(|(&v, &b)| b.then_some(v))
        .collect();
    if vals.is_empty() {
        return Err(Error::EmptyMask);
    }
    Ok(vals)
}

/// `-Σ p log2 p` with `0·log 0 = 0`.
pub(crate) fn entropy_bits<'a>(probs: impl IntoIterator<Item = &'a f64>) -> f64 {
    -probs
        .into_iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.log2())
        .sum::<f64>()
}
