//! The fixed 374-entry feature catalog.
//!
//! ```text
//! original image: first-order 13 + shape 9 + GLCM 8×4 + GLRLM 7×4 = 82
//! each Haar subband (LL, LH, HL, HH): first-order 13 + GLCM 32 + GLRLM 28 = 73
//! total: 82 + 4 × 73 = 374
//! ```
//!
//! Subband statistics use the mask halved by the 2×2 any-set rule. When an
//! ROI is too thin for any pixel pair at some offset, that offset's eight
//! GLCM values are reported as 0.

use serde::{Deserialize, Serialize};

use super::glcm::GLCM_FEATURE_NAMES;
use super::{
    first_order_features, glcm_compute, glcm_features, glrlm_compute, glrlm_features, quantize,
    shape_features, wavelet_decompose, FeatureVector, Raster,
};
use crate::data::{Image2D, RoiMask};
use crate::error::{Error, Result};

/// Offsets/directions used for both GLCM and GLRLM: 0°, 90°, 45°, 135°.
pub const DIRECTIONS: [(isize, isize); 4] = [(0, 1), (1, 0), (1, 1), (1, -1)];

pub const FIRST_ORDER_LEN: usize = 13;
pub const SHAPE_LEN: usize = 9;
pub const GLCM_LEN: usize = 8 * DIRECTIONS.len();
pub const GLRLM_LEN: usize = 7 * DIRECTIONS.len();
pub const CATALOG_LEN: usize =
    FIRST_ORDER_LEN + SHAPE_LEN + GLCM_LEN + GLRLM_LEN + 4 * (FIRST_ORDER_LEN + GLCM_LEN + GLRLM_LEN);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RadiomicsConfig {
    /// Gray levels for GLCM/GLRLM quantization.
    pub levels: usize,
    pub symmetric_glcm: bool,
}

impl Default for RadiomicsConfig {
    fn default() -> Self {
        Self {
            levels: 32,
            symmetric_glcm: true,
        }
    }
}

fn direction_tag((dr, dc): (isize, isize)) -> String {
    format!("{dr}_{dc}")
}

fn texture_features<R: Raster + ?Sized>(img: &R, mask: &RoiMask, cfg: &RadiomicsConfig) -> Result<FeatureVector> {
    let q = quantize(img, mask, cfg.levels)?;
    let mut fv = FeatureVector::default();
    for dir in DIRECTIONS {
        let tag = format!("glcm_{}", direction_tag(dir));
        let g = match glcm_compute(&q, dir, cfg.symmetric_glcm) {
            Ok(g) => glcm_features(&g),
            Err(Error::EmptyCooccurrence(..)) => FeatureVector {
                names: GLCM_FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
                values: vec![0.0; GLCM_FEATURE_NAMES.len()],
            },
            Err(e) => return Err(e),
        };
        fv.extend_prefixed(&tag, g);
    }
    for dir in DIRECTIONS {
        let r = glrlm_features(&glrlm_compute(&q, dir)?)?;
        fv.extend_prefixed(&format!("glrlm_{}", direction_tag(dir)), r);
    }
    Ok(fv)
}

/// Every catalog feature, in catalog order.
pub fn extract_all(img: &Image2D, mask: &RoiMask, cfg: &RadiomicsConfig) -> Result<FeatureVector> {
    if !mask.matches(img) {
        return Err(Error::Shape(format!(
            "mask {}x{} vs image {}x{}",
            mask.width(),
            mask.height(),
            img.width(),
            img.height()
        )));
    }
    let mut out = FeatureVector::default();
    let mut original = FeatureVector::default();
    original.extend_prefixed("firstorder", first_order_features(img, mask)?);
    original.extend_prefixed("shape", shape_features(mask)?);
    let tex = texture_features(img, mask, cfg)?;
    original.names.extend(tex.names);
    original.values.extend(tex.values);
    out.extend_prefixed("original", original);

    let bands = wavelet_decompose(img);
    let half = mask.downsample_any();
    for (name, band) in bands.named() {
        let mut fv = FeatureVector::default();
        fv.extend_prefixed("firstorder", first_order_features(band, &half)?);
        let tex = texture_features(band, &half, cfg)?;
        fv.names.extend(tex.names);
        fv.values.extend(tex.values);
        out.extend_prefixed(&format!("wavelet-{name}"), fv);
    }
    debug_assert_eq!(out.len(), CATALOG_LEN);
    Ok(out)
}

/// Catalog names without computing anything.
pub fn catalog_names() -> Vec<String> {
    let img = Image2D::filled(2, 2, 0.0).expect("2x2 image");
    let mask = RoiMask::full(2, 2).expect("2x2 mask");
    extract_all(&img, &mask, &RadiomicsConfig::default())
        .expect("catalog on a constant image")
        .names
}
