//! Manifest CSV: `sample_id,patient_id,image,mask,label,stage,subtype`.

use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::image::{Image2D, RoiMask};
use super::pgm;
use crate::error::{Error, Result};

const HEADER: [&str; 7] = [
    "sample_id",
    "patient_id",
    "image",
    "mask",
    "label",
    "stage",
    "subtype",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Baseline,
    Early,
    Inter,
    Presurgery,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Subtype {
    #[serde(rename = "HR+HER2-")]
    HrPositiveHer2Negative,
    #[serde(rename = "TN/HER2+")]
    TripleNegativeOrHer2Positive,
    #[serde(rename = "unknown")]
    Unknown,
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s.trim() {
            "baseline" => Stage::Baseline,
            "early" => Stage::Early,
            "inter" => Stage::Inter,
            "presurgery" => Stage::Presurgery,
            "unknown" | "" => Stage::Unknown,
            other => return Err(format!("unknown stage `{other}`")),
        })
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Baseline => "baseline",
            Stage::Early => "early",
            Stage::Inter => "inter",
            Stage::Presurgery => "presurgery",
            Stage::Unknown => "unknown",
        })
    }
}

impl FromStr for Subtype {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s.trim() {
            "HR+HER2-" => Subtype::HrPositiveHer2Negative,
            "TN/HER2+" => Subtype::TripleNegativeOrHer2Positive,
            "unknown" | "" => Subtype::Unknown,
            other => return Err(format!("unknown subtype `{other}`")),
        })
    }
}

impl fmt::Display for Subtype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Subtype::HrPositiveHer2Negative => "HR+HER2-",
            Subtype::TripleNegativeOrHer2Positive => "TN/HER2+",
            Subtype::Unknown => "unknown",
        })
    }
}

/// One slice with its ROI and response label (1 = pCR).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub sample_id: String,
    pub patient_id: String,
    pub image_path: String,
    pub mask_path: String,
    pub label: u8,
    pub stage: Stage,
    pub subtype: Subtype,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    records: Vec<SampleRecord>,
    base_dir: PathBuf,
}

impl Dataset {
    pub fn new(records: Vec<SampleRecord>, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut seen = HashSet::new();
        for r in &records {
            if r.label > 1 {
                return Err(Error::InvalidArgument(format!(
                    "label {} of `{}` outside {{0,1}}",
                    r.label, r.sample_id
                )));
            }
            if !seen.insert(r.sample_id.as_str()) {
                return Err(Error::DuplicateSample(r.sample_id.clone()));
            }
        }
        Ok(Self {
            records,
            base_dir: base_dir.into(),
        })
    }

    pub fn records(&self) -> &[SampleRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn base_dir(&self) -> &Path {
        &self.base_dir
    }

    /// `(n_positive, n_negative)`.
    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.records.iter().filter(|r| r.label == 1).count();
        (pos, self.records.len() - pos)
    }

    pub fn labels(&self) -> Vec<u8> {
        self.records.iter().map(|r| r.label).collect()
    }

    /// Subset of records satisfying `keep` (e.g. one subtype or stage).
    pub fn filter(&self, keep: impl Fn(&SampleRecord) -> bool) -> Dataset {
        Dataset {
            records: self.records.iter().filter(|r| keep(r)).cloned().collect(),
            base_dir: self.base_dir.clone(),
        }
    }

    pub fn resolve(&self, rel: &str) -> PathBuf {
        self.base_dir.join(rel)
    }

    /// Loads the image and mask of a record, checking that they align.
    pub fn load_sample(&self, rec: &SampleRecord) -> Result<(Image2D, RoiMask)> {
        let load = || -> Result<(Image2D, RoiMask)> {
            let img = pgm::read_image(&self.resolve(&rec.image_path))?;
            let mask = pgm::read_mask(&self.resolve(&rec.mask_path))?;
            if !mask.matches(&img) {
                return Err(Error::Shape(format!(
                    "mask {}x{} vs image {}x{}",
                    mask.width(),
                    mask.height(),
                    img.width(),
                    img.height()
                )));
            }
            Ok((img, mask))
        };
        load().map_err(|e| Error::Sample {
            sample_id: rec.sample_id.clone(),
            source: Box::new(e),
        })
    }
}

pub fn load_manifest(path: &Path) -> Result<Dataset> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let row_err = |row: usize, reason: String| Error::ManifestRow {
        path: path.to_path_buf(),
        row,
        reason,
    };
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let header = reader
        .headers()
        .map_err(|e| row_err(1, e.to_string()))?
        .clone();
    let got: Vec<&str> = header.iter().map(str::trim).collect();
    if got != HEADER {
        return Err(row_err(1, format!("expected header `{}`", HEADER.join(","))));
    }

    let mut records = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| row_err(line, e.to_string()))?;
        if row.len() != HEADER.len() {
            return Err(row_err(line, format!("expected 7 fields, found {}", row.len())));
        }
        let field = |k: usize| row[k].trim().to_string();
        let label = match row[4].trim() {
            "0" => 0,
            "1" => 1,
            other => return Err(row_err(line, format!("label `{other}` outside {{0,1}}"))),
        };
        let sample_id = field(0);
        if sample_id.is_empty() {
            return Err(row_err(line, "empty sample_id".into()));
        }
        records.push(SampleRecord {
            sample_id,
            patient_id: field(1),
            image_path: field(2),
            mask_path: field(3),
            label,
            stage: row[5].parse().map_err(|e| row_err(line, e))?,
            subtype: row[6].parse().map_err(|e| row_err(line, e))?,
        });
    }
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Dataset::new(records, base)
}

pub fn write_manifest(path: &Path, records: &[SampleRecord]) -> Result<()> {
    let io_err = |e: csv::Error| Error::io(path, std::io::Error::other(e));
    let mut w = csv::Writer::from_path(path).map_err(io_err)?;
    w.write_record(HEADER).map_err(io_err)?;
    for r in records {
        w.write_record([
            r.sample_id.as_str(),
            r.patient_id.as_str(),
            r.image_path.as_str(),
            r.mask_path.as_str(),
            if r.label == 1 { "1" } else { "0" },
            &r.stage.to_string(),
            &r.subtype.to_string(),
        ])
        .map_err(io_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
