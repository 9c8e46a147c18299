use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::classifiers::ClassifierConfig;
use crate::crbm::{CrbmTrainConfig, ReductionWeights, VisibleMode};
use crate::error::{Error, Result};
use crate::evaluation::FoldMode;
use crate::pls::PlsOutput;
use crate::radiomics::RadiomicsConfig;
use crate::rng::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureSource {
    Radiomics,
    CrbmImage,
    #[default]
    CrbmPatch,
}

impl FeatureSource {
    pub fn uses_crbm(self) -> bool {
        !matches!(self, FeatureSource::Radiomics)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CrbmSection {
    pub num_filters: usize,
    pub kernel_size: usize,
    /// Side of the visible layer; 256 for whole slices and 32 for patches
    /// when unset.
    pub input_size: Option<usize>,
    /// Patch origin spacing; half the patch side when unset.
    pub patch_stride: Option<usize>,
    pub learning_rate: f64,
    pub cd_steps: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub weight_init_sigma: f64,
    pub visible_mode: VisibleMode,
    pub binary_threshold: f64,
}

impl Default for CrbmSection {
    fn default() -> Self {
        let t = CrbmTrainConfig::default();
        Self {
            num_filters: 64,
            kernel_size: 5,
            input_size: None,
            patch_stride: None,
            learning_rate: t.learning_rate,
            cd_steps: t.cd_steps,
            epochs: t.epochs,
            batch_size: t.batch_size,
            weight_init_sigma: t.weight_init_sigma,
            visible_mode: t.visible_mode,
            binary_threshold: t.binary_threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CvSection {
    pub k: usize,
    pub mode: FoldMode,
}

impl Default for CvSection {
    fn default() -> Self {
        Self {
            k: 4,
            mode: FoldMode::SliceLevel,
        }
    }
}

/// One experiment. Every random stream is derived from `seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub seed: u64,
    pub feature_source: FeatureSource,
    pub crbm: CrbmSection,
    pub reduction_weights: ReductionWeights,
    pub radiomics: RadiomicsConfig,
    pub pls_components: usize,
    pub pls_output: PlsOutput,
    pub classifier: ClassifierConfig,
    pub cv: CvSection,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            feature_source: FeatureSource::default(),
            crbm: CrbmSection::default(),
            reduction_weights: ReductionWeights::Uniform,
            radiomics: RadiomicsConfig::default(),
            pls_components: 20,
            pls_output: PlsOutput::Latent,
            classifier: ClassifierConfig::default(),
            cv: CvSection::default(),
        }
    }
}

/// Seeds handed to each stochastic component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedLedger {
    pub seed: u64,
    pub crbm_init: u64,
    pub crbm_train: u64,
    pub reduction: u64,
    pub folds: u64,
    pub classifier: u64,
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: String| Err(Error::Config(what));
        if self.crbm.num_filters == 0 || self.crbm.kernel_size == 0 {
            return bad("crbm.num_filters and crbm.kernel_size must be >= 1".into());
        }
        if self.crbm.kernel_size > self.input_size() {
            return bad(format!(
                "crbm.kernel_size {} exceeds input size {}",
                self.crbm.kernel_size,
                self.input_size()
            ));
        }
        if self.crbm.patch_stride == Some(0) {
            return bad("crbm.patch_stride must be >= 1".into());
        }
        self.crbm_train_config().validate()?;
        if self.radiomics.levels < 2 {
            return bad("radiomics.levels must be >= 2".into());
        }
        if self.pls_components == 0 {
            return bad("pls_components must be >= 1".into());
        }
        if self.cv.k < 2 {
            return bad(format!("cv.k must be >= 2, got {}", self.cv.k));
        }
        Ok(())
    }

    pub fn input_size(&self) -> usize {
        self.crbm.input_size.unwrap_or(match self.feature_source {
            FeatureSource::CrbmPatch => 32,
            _ => 256,
        })
    }

    pub fn patch_stride(&self) -> usize {
        self.crbm.patch_stride.unwrap_or((self.input_size() / 2).max(1))
    }

    pub fn seeds(&self) -> SeedLedger {
        SeedLedger {
            seed: self.seed,
            crbm_init: derive_seed(self.seed, "crbm-init", 0),
            crbm_train: derive_seed(self.seed, "crbm", 0),
            reduction: derive_seed(self.seed, "reduction", 0),
            folds: derive_seed(self.seed, "folds", 0),
            classifier: derive_seed(self.seed, "classifier", 0),
        }
    }

    pub fn crbm_train_config(&self) -> CrbmTrainConfig {
        let c = &self.crbm;
        CrbmTrainConfig {
            learning_rate: c.learning_rate,
            cd_steps: c.cd_steps,
            epochs: c.epochs,
            batch_size: c.batch_size,
            rng_seed: derive_seed(self.seed, "crbm", 0),
            weight_init_sigma: c.weight_init_sigma,
            visible_mode: c.visible_mode,
            binary_threshold: c.binary_threshold,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = PipelineConfig::default();
        assert_eq!((c.crbm.num_filters, c.crbm.kernel_size), (64, 5));
        assert_eq!(c.crbm.learning_rate, 1e-4);
        assert_eq!(c.pls_components, 20);
        assert_eq!(c.cv.k, 4);
        assert_eq!(c.input_size(), 32);
        let img = PipelineConfig { feature_source: FeatureSource::CrbmImage, ..c };
        assert_eq!(img.input_size(), 256);
    }

    #[test]
    fn toml_round_trip() {
        let c = PipelineConfig::from_toml(
            "seed = 9\nfeature_source = \"radiomics\"\n[classifier]\nkind = \"rf\"\nn_trees = 7\n",
        )
        .unwrap();
        assert_eq!(c.feature_source, FeatureSource::Radiomics);
        assert_eq!(c.classifier.name(), "rf");
        assert_eq!(PipelineConfig::from_toml(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn unknown_classifier_is_config_error() {
        let e = PipelineConfig::from_toml("[classifier]\nkind = \"knn\"\n").unwrap_err();
        assert!(e.is_config());
        let e = PipelineConfig::from_toml("bogus = 1\n").unwrap_err();
        assert!(e.is_config());
        let e = PipelineConfig::from_toml("[cv]\nk = 1\n").unwrap_err();
        assert!(e.is_config());
    }
}
