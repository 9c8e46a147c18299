//! Semantic and hand-crafted image features for binary response prediction.
//!
//! The crate bundles the whole pipeline:
//!
//! * [`data`]: grayscale rasters, ROI masks, PGM I/O, manifests and patching.
//! * [`crbm`]: a binary convolutional RBM trained by contrastive divergence,
//!   with exact-enumeration oracles for tiny models.
//! * [`radiomics`]: first-order, shape, GLCM, GLRLM and Haar-wavelet features.
//! * [`pls`]: PLS1/NIPALS reduction of feature matrices.
//! * [`classifiers`]: logistic regression, linear SVM and random forest heads.
//! * [`evaluation`]: ROC/AUC, confusion metrics and k-fold cross-validation.
//! * [`pipeline`]: configuration, synthetic corpora and end-to-end runs.

pub mod classifiers;
pub mod crbm;
pub mod data;
pub mod error;
pub mod evaluation;
pub mod matrix;
pub mod pipeline;
pub mod pls;
pub mod radiomics;
pub mod rng;

pub use crate::crbm::{CrbmModel, CrbmTrainConfig, HiddenState, TrainHistory};
pub use crate::data::{Dataset, Image2D, RoiMask, SampleRecord};
pub use crate::error::{Error, Result};
pub use crate::evaluation::{EvalReport, FoldPlan, RocCurve};
pub use crate::matrix::FeatureMatrix;
pub use crate::pls::PlsModel;
pub use crate::radiomics::FeatureVector;

/// Crate version, embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[inline]
pub(crate) fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// `ln(1 + e^x)` without overflow.
#[inline]
pub(crate) fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}
