//! End-to-end experiment driver: configuration, synthetic corpus, feature
//! extraction and cross-validated evaluation.

mod config;
mod features;
mod run;
mod synth;

pub use self::config::{CrbmSection, CvSection, FeatureSource, PipelineConfig, SeedLedger};
pub use self::features::{crbm_inputs, extract_features, train_crbm, FeatureTable};
pub use self::run::{cmd_extract, cmd_run, cmd_train_crbm, cross_validate, run_pipeline, RunReport};
pub use self::synth::{cmd_synth, SynthSpec};
