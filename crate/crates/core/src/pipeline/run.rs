use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{FeatureSource, PipelineConfig, SeedLedger};
use super::features::{extract_features, train_crbm};
use crate::crbm::{CrbmModel, TrainHistory};
use crate::data::{load_manifest, Dataset};
use crate::error::{Error, Result};
use crate::evaluation::{cross_validate_features, make_folds, CvInput, EvalReport};

/// Everything needed to audit and re-run one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub version: String,
    pub config: PipelineConfig,
    pub seeds: SeedLedger,
    pub n_feature_rows: usize,
    pub n_features: usize,
    pub notes: Vec<String>,
    pub evaluation: EvalReport,
}

impl RunReport {
    pub fn to_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

fn notes(cfg: &PipelineConfig, model_given: bool) -> Vec<String> {
    let mut n = vec![
        "headline metrics pool the held-out scores of all folds; per-fold metrics are listed separately".to_string(),
        "PLS and the classifier are fitted on training folds only; PLS scores are z-scored with training-fold statistics".to_string(),
        format!(
            "threshold_used is the classifier default ({}); youden holds metrics at the Youden-optimal cutoff",
            if cfg.classifier.name() == "svm" { "0 on margins" } else { "0.5 on probabilities" }
        ),
    ];
    if cfg.feature_source.uses_crbm() {
        n.push(if model_given {
            "CRBM supplied by the caller; it was trained without labels".to_string()
        } else {
            "CRBM trained once, without labels, on all images before cross-validation".to_string()
        });
    }
    if cfg.feature_source == FeatureSource::CrbmPatch {
        n.push("patch scores are averaged into one score per slice before evaluation".to_string());
    }
    n
}

/// Full pipeline on a loaded dataset. CRBM sources train a model unless one
/// is given.
pub fn run_pipeline(cfg: &PipelineConfig, dataset: &Dataset, model: Option<&CrbmModel>) -> Result<RunReport> {
    cfg.validate()?;
    let model_given = model.is_some();
    let trained;
    let model = match (cfg.feature_source.uses_crbm(), model) {
        (true, None) => {
            trained = train_crbm(cfg, dataset)?.0;
            Some(&trained)
        }
        (_, m) => m,
    };
    let table = extract_features(cfg, dataset, model)?;
    let seeds = cfg.seeds();
    let plan = make_folds(dataset, cfg.cv.k, cfg.cv.mode, seeds.folds)?;
    let input = CvInput {
        features: &table.matrix,
        row_sample: &table.row_sample,
        labels: &table.labels,
    };
    let evaluation = cross_validate_features(
        input,
        &plan,
        cfg.pls_components,
        cfg.pls_output,
        &cfg.classifier,
        seeds.classifier,
    )?;
    Ok(RunReport {
        version: crate::VERSION.to_string(),
        config: cfg.clone(),
        seeds,
        n_feature_rows: table.matrix.n_rows(),
        n_features: table.matrix.n_cols(),
        notes: notes(cfg, model_given),
        evaluation,
    })
}

pub fn cross_validate(cfg: &PipelineConfig, dataset: &Dataset) -> Result<EvalReport> {
    run_pipeline(cfg, dataset, None).map(|r| r.evaluation)
}

fn sibling(path: &Path, ext: &str) -> PathBuf {
    path.with_extension(ext)
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Writes the model to `out_model` and the per-epoch history next to it
/// (`<stem>.history.csv`).
pub fn cmd_train_crbm(cfg: &PipelineConfig, manifest: &Path, out_model: &Path) -> Result<TrainHistory> {
    cfg.validate()?;
    if !cfg.feature_source.uses_crbm() {
        return Err(Error::Config("feature_source `radiomics` has no CRBM to train".into()));
    }
    let dataset = load_manifest(manifest)?;
    let (model, history) = train_crbm(cfg, &dataset)?;
    model.save(out_model)?;
    write(&sibling(out_model, "history.csv"), &history.to_csv())?;
    Ok(history)
}

pub fn cmd_extract(cfg: &PipelineConfig, manifest: &Path, model: Option<&Path>, out_csv: &Path) -> Result<()> {
    cfg.validate()?;
    let dataset = load_manifest(manifest)?;
    let model = match (cfg.feature_source.uses_crbm(), model) {
        (true, Some(p)) => Some(CrbmModel::load(p)?),
        (true, None) => return Err(Error::Config("--model is required for CRBM feature sources".into())),
        (false, _) => None,
    };
    extract_features(cfg, &dataset, model.as_ref())?.write_csv(out_csv)
}

/// Writes the report to `out_report` and the ROC points to `<stem>.roc.csv`.
pub fn cmd_run(cfg: &PipelineConfig, manifest: &Path, model: Option<&Path>, out_report: &Path) -> Result<RunReport> {
    cfg.validate()?;
    let dataset = load_manifest(manifest)?;
    let model = match model {
        Some(p) if cfg.feature_source.uses_crbm() => Some(CrbmModel::load(p)?),
        _ => None,
    };
    let report = run_pipeline(cfg, &dataset, model.as_ref())?;
    write(out_report, &report.to_text())?;
    write(&sibling(out_report, "roc.csv"), &report.evaluation.roc.to_csv())?;
    Ok(report)
}
