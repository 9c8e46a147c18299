use std::path::Path;

use rayon::prelude::*;

use super::config::{FeatureSource, PipelineConfig};
use crate::crbm::{extract_feature_map, reduce_1x1, train, CrbmModel, TrainHistory};
use crate::data::{crop_to_roi, extract_patches, resize_or_pad, Dataset, Image2D, RoiMask};
use crate::error::{Error, Result};
use crate::matrix::FeatureMatrix;
use crate::radiomics::extract_all;

/// Feature rows with the sample each row came from.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub matrix: FeatureMatrix,
    pub row_sample: Vec<usize>,
    pub sample_ids: Vec<String>,
    pub labels: Vec<u8>,
}

impl FeatureTable {
    /// One row per sample; samples with several rows get their mean.
    pub fn per_sample(&self) -> Result<FeatureMatrix> {
        let p = self.matrix.n_cols();
        let mut sums = vec![0.0; self.sample_ids.len() * p];
        let mut counts = vec![0usize; self.sample_ids.len()];
        for (row, &s) in self.matrix.rows().zip(&self.row_sample) {
            counts[s] += 1;
            for (acc, v) in sums[s * p..(s + 1) * p].iter_mut().zip(row) {
                *acc += v;
            }
        }
        for (s, &c) in counts.iter().enumerate() {
            if c == 0 {
                return Err(Error::Empty(format!("sample `{}` has no feature rows", self.sample_ids[s])));
            }
            sums[s * p..(s + 1) * p].iter_mut().for_each(|v| *v /= c as f64);
        }
        FeatureMatrix::new(self.matrix.names().to_vec(), self.sample_ids.len(), sums)
    }

    /// `sample_id,<features>,label`, one row per sample, full precision.
    pub fn to_csv(&self) -> Result<String> {
        let m = self.per_sample()?;
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["sample_id".to_string()];
        header.extend(m.names().iter().cloned());
        header.push("label".into());
        let serr = |e: csv::Error| Error::Serde(e.to_string());
        w.write_record(&header).map_err(serr)?;
        for (i, row) in m.rows().enumerate() {
            let mut rec = vec![self.sample_ids[i].clone()];
            rec.extend(row.iter().map(|v| v.to_string()));
            rec.push(self.labels[i].to_string());
            w.write_record(&rec).map_err(serr)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Serde(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()?).map_err(|e| Error::io(path, e))
    }
}

fn load_all(dataset: &Dataset) -> Result<Vec<(Image2D, RoiMask)>> {
    dataset
        .records()
        .par_iter()
        .map(|rec| dataset.load_sample(rec))
        .collect()
}

/// CRBM inputs for one slice: the ROI crop resized or padded to the input
/// side, or every patch of the crop (padded first if it is too small).
pub fn crbm_inputs(cfg: &PipelineConfig, img: &Image2D, mask: &RoiMask) -> Result<Vec<Image2D>> {
    let crop = crop_to_roi(img, mask)?;
    let n = cfg.input_size();
    match cfg.feature_source {
        FeatureSource::CrbmPatch => {
            let crop = if crop.width() < n || crop.height() < n {
                resize_or_pad(&crop, crop.width().max(crop.height()).max(n))?
            } else {
                crop
            };
            extract_patches(&crop, n, cfg.patch_stride())
        }
        _ => Ok(vec![resize_or_pad(&crop, n)?]),
    }
}

fn all_crbm_inputs(cfg: &PipelineConfig, dataset: &Dataset) -> Result<(Vec<Image2D>, Vec<usize>)> {
    let per_sample: Vec<Vec<Image2D>> = dataset
        .records()
        .par_iter()
        .map(|rec| {
            let (img, mask) = dataset.load_sample(rec)?;
            crbm_inputs(cfg, &img, &mask).map_err(|e| Error::Sample {
                sample_id: rec.sample_id.clone(),
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;
    let mut inputs = Vec::new();
    let mut owners = Vec::new();
    for (s, v) in per_sample.into_iter().enumerate() {
        owners.extend(std::iter::repeat_n(s, v.len()));
        inputs.extend(v);
    }
    Ok((inputs, owners))
}

fn check_dataset(dataset: &Dataset) -> Result<()> {
    if dataset.is_empty() {
        return Err(Error::Empty("manifest has no samples".into()));
    }
    Ok(())
}

/// Unsupervised CRBM training on every input of the dataset (labels unused).
pub fn train_crbm(cfg: &PipelineConfig, dataset: &Dataset) -> Result<(CrbmModel, TrainHistory)> {
    check_dataset(dataset)?;
    let (inputs, _) = all_crbm_inputs(cfg, dataset)?;
    let seeds = cfg.seeds();
    let init = CrbmModel::random(
        cfg.crbm.num_filters,
        cfg.crbm.kernel_size,
        cfg.input_size(),
        cfg.crbm.weight_init_sigma,
        seeds.crbm_init,
    )?;
    train(&init, &inputs, &cfg.crbm_train_config())
}

fn crbm_table(cfg: &PipelineConfig, dataset: &Dataset, model: &CrbmModel) -> Result<(FeatureMatrix, Vec<usize>)> {
    if model.input_size() != cfg.input_size() {
        return Err(Error::Config(format!(
            "model input size {} differs from the configured {}",
            model.input_size(),
            cfg.input_size()
        )));
    }
    let (inputs, owners) = all_crbm_inputs(cfg, dataset)?;
    let weights = cfg
        .reduction_weights
        .weights(model.num_filters(), cfg.seeds().reduction);
    let rows = inputs
        .par_iter()
        .map(|img| reduce_1x1(&extract_feature_map(model, img)?, &weights))
        .collect::<Result<Vec<_>>>()?;
    let names = (0..rows.first().map_or(0, Vec::len)).map(|i| format!("crbm_{i}")).collect();
    Ok((FeatureMatrix::from_rows(names, &rows)?, owners))
}

fn radiomics_table(cfg: &PipelineConfig, dataset: &Dataset) -> Result<FeatureMatrix> {
    let samples = load_all(dataset)?;
    let vectors = samples
        .par_iter()
        .zip(dataset.records())
        .map(|((img, mask), rec)| {
            extract_all(img, mask, &cfg.radiomics).map_err(|e| Error::Sample {
                sample_id: rec.sample_id.clone(),
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let names = vectors[0].names.clone();
    let rows: Vec<Vec<f64>> = vectors.into_iter().map(|v| v.values).collect();
    FeatureMatrix::from_rows(names, &rows)
}

/// Features for every sample; CRBM sources need a trained model.
pub fn extract_features(cfg: &PipelineConfig, dataset: &Dataset, model: Option<&CrbmModel>) -> Result<FeatureTable> {
    check_dataset(dataset)?;
    let (matrix, row_sample) = match cfg.feature_source {
        FeatureSource::Radiomics => {
            let m = radiomics_table(cfg, dataset)?;
            let owners = (0..m.n_rows()).collect();
            (m, owners)
        }
        _ => {
            let model = model.ok_or_else(|| Error::Config("CRBM feature sources need a model".into()))?;
            crbm_table(cfg, dataset, model)?
        }
    };
    if !matrix.is_finite() {
        return Err(Error::InvalidArgument("non-finite features".into()));
    }
    Ok(FeatureTable {
        matrix,
        row_sample,
        sample_ids: dataset.records().iter().map(|r| r.sample_id.clone()).collect(),
        labels: dataset.labels(),
    })
}
