//! Text model file: JSON with full-precision decimal numbers.

use serde::{Deserialize, Serialize};

use super::model::CrbmModel;
use crate::error::{Error, Result};

pub const MODEL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    version: u32,
    num_filters: usize,
    kernel_size: usize,
    input_size: usize,
    visible_bias: f64,
    hidden_biases: Vec<f64>,
    /// One row-major `K*K` array per filter.
    filters: Vec<Vec<f64>>,
}

impl CrbmModel {
    pub fn to_text(&self) -> String {
        let kk = self.kernel_size() * self.kernel_size();
        let file = ModelFile {
            version: MODEL_VERSION,
            num_filters: self.num_filters(),
            kernel_size: self.kernel_size(),
            input_size: self.input_size(),
            visible_bias: self.visible_bias,
            hidden_biases: self.hidden_biases.clone(),
            filters: self.filters.chunks(kk).map(<[f64]>::to_vec).collect(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("model serializes");
        s.push('\n');
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text)?;
        if file.version != MODEL_VERSION {
            return Err(Error::Serde(format!("unsupported model version {}", file.version)));
        }
        if file.filters.len() != file.num_filters || file.hidden_biases.len() != file.num_filters {
            return Err(Error::Serde("filter count disagrees with num_filters".into()));
        }
        let kk = file.kernel_size * file.kernel_size;
        if file.filters.iter().any(|f| f.len() != kk) {
            return Err(Error::Serde(format!("every filter must hold {kk} weights")));
        }
        CrbmModel::from_parameters(
            file.kernel_size,
            file.input_size,
            file.visible_bias,
            file.hidden_biases,
            file.filters.concat(),
        )
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn text_round_trip_is_exact(seed in any::<u64>(), m in 1usize..4, k in 1usize..4, b in -5.0f64..5.0) {
            let mut model = CrbmModel::random(m, k, k + 2, 0.37, seed).unwrap();
            model.visible_bias = b / 3.0;
            model.hidden_biases = (0..m).map(|i| (i as f64 + b).sin() * 1e-7).collect();
            let back = CrbmModel::from_text(&model.to_text()).unwrap();
            prop_assert_eq!(back, model);
        }
    }

    #[test]
    fn rejects_inconsistent_file() {
        let model = CrbmModel::random(2, 2, 3, 0.1, 0).unwrap();
        let text = model.to_text().replace("\"num_filters\": 2", "\"num_filters\": 3");
        assert!(CrbmModel::from_text(&text).is_err());
        let bumped = model.to_text().replace("\"version\": 1", "\"version\": 9");
        assert!(CrbmModel::from_text(&bumped).is_err());
    }
}
