use serde::{Deserialize, Serialize};

use super::{entropy_bits, FeatureVector, QuantizedImage};
use crate::error::{Error, Result};

/// Normalized gray-level co-occurrence matrix; cell `(i, j)` is stored at
/// `(i-1)·L + (j-1)` for levels `i, j` in `1..=L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Glcm {
    pub levels: usize,
    pub offset: (isize, isize),
    pub probs: Vec<f64>,
}

impl Glcm {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.probs[(i - 1) * self.levels + (j - 1)]
    }
}

/// Co-occurrences of level pairs `(q[r,c], q[r+dr, c+dc])`, both pixels in
/// the ROI, optionally symmetrized, normalized to unit mass.
pub fn glcm_compute(q: &QuantizedImage, offset: (isize, isize), symmetric: bool) -> Result<Glcm> {
    if offset == (0, 0) {
        return Err(Error::InvalidArgument("GLCM offset must be non-zero".into()));
    }
    let l = q.levels;
    let mut counts = vec![0u64; l * l];
    let mut total = 0u64;
    for r in 0..q.height as isize {
        for c in 0..q.width as isize {
            let (Some(a), Some(b)) = (q.code(r, c), q.code(r + offset.0, c + offset.1)) else {
                continue;
            };
            let (a, b) = (a as usize - 1, b as usize - 1);
            counts[a * l + b] += 1;
            total += 1;
            if symmetric {
                counts[b * l + a] += 1;
                total += 1;
            }
        }
    }
    if total == 0 {
        return Err(Error::EmptyCooccurrence(offset.0, offset.1));
    }
    Ok(Glcm {
        levels: l,
        offset,
        probs: counts.iter().map(|&c| c as f64 / total as f64).collect(),
    })
}

pub(crate) const GLCM_FEATURE_NAMES: [&str; 8] = [
    "contrast",
    "dissimilarity",
    "homogeneity",
    "asm",
    "entropy",
    "correlation",
    "cluster_shade",
    "cluster_prominence",
];

/// Eight Haralick-family statistics of one GLCM.
pub fn glcm_features(g: &Glcm) -> FeatureVector {
    let l = g.levels;
    let (mut mu_i, mut mu_j) = (0.0, 0.0);
    for i in 1..=l {
        for j in 1..=l {
            let p = g.at(i, j);
            mu_i += i as f64 * p;
            mu_j += j as f64 * p;
        }
    }
    let (mut var_i, mut var_j, mut cov) = (0.0, 0.0, 0.0);
    let (mut contrast, mut dissimilarity, mut homogeneity, mut asm) = (0.0, 0.0, 0.0, 0.0);
    let (mut shade, mut prominence) = (0.0, 0.0);
    for i in 1..=l {
        for j in 1..=l {
            let p = g.at(i, j);
            if p == 0.0 {
                continue;
            }
            let (fi, fj) = (i as f64, j as f64);
            let d = fi - fj;
            contrast += d * d * p;
            dissimilarity += d.abs() * p;
            homogeneity += p / (1.0 + d * d);
            asm += p * p;
            var_i += (fi - mu_i).powi(2) * p;
            var_j += (fj - mu_j).powi(2) * p;
            cov += (fi - mu_i) * (fj - mu_j) * p;
            let s = fi + fj - mu_i - mu_j;
            shade += s.powi(3) * p;
            prominence += s.powi(4) * p;
        }
    }
    let sd = (var_i * var_j).sqrt();
    let correlation = if sd > 1e-12 { cov / sd } else { 0.0 };

    let values = [
        contrast,
        dissimilarity,
        homogeneity,
        asm,
        entropy_bits(&g.probs),
        correlation,
        shade,
        prominence,
    ];
    FeatureVector {
        names: GLCM_FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
        values: values.to_vec(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(width: usize, height: usize, levels: usize, codes: &[u16]) -> QuantizedImage {
        QuantizedImage::from_codes(width, height, levels, codes.to_vec()).unwrap()
    }

    #[test]
    fn constant_block() {
        let g = glcm_compute(&q(2, 2, 2, &[1, 1, 1, 1]), (0, 1), false).unwrap();
        assert_eq!(g.probs, vec![1.0, 0.0, 0.0, 0.0]);
        let f = glcm_features(&g);
        assert_eq!(f.get("contrast"), Some(0.0));
        assert_eq!(f.get("homogeneity"), Some(1.0));
        assert_eq!(f.get("asm"), Some(1.0));
        assert_eq!(f.get("entropy"), Some(0.0));
        assert_eq!(f.get("correlation"), Some(0.0));
    }

    #[test]
    fn checkerboard() {
        let g = glcm_compute(&q(4, 4, 2, &[1, 2, 1, 2, 2, 1, 2, 1, 1, 2, 1, 2, 2, 1, 2, 1]), (0, 1), true)
            .unwrap();
        assert_eq!(g.probs, vec![0.0, 0.5, 0.5, 0.0]);
        let f = glcm_features(&g);
        assert_eq!(f.get("contrast"), Some(1.0));
        assert!((f.get("correlation").unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn uniform_matrix() {
        let g = Glcm {
            levels: 2,
            offset: (0, 1),
            probs: vec![0.25; 4],
        };
        let f = glcm_features(&g);
        assert_eq!(f.get("entropy"), Some(2.0));
        assert_eq!(f.get("asm"), Some(0.25));
        assert_eq!(f.get("correlation"), Some(0.0));
    }

    #[test]
    fn symmetric_is_transpose_invariant() {
        let img = q(3, 3, 3, &[1, 2, 3, 3, 1, 2, 2, 2, 1]);
        for off in [(0, 1), (1, 0), (1, 1), (1, -1)] {
            let g = glcm_compute(&img, off, true).unwrap();
            for i in 1..=3 {
                for j in 1..=3 {
                    assert_eq!(g.at(i, j), g.at(j, i));
                }
            }
            assert!((g.probs.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn pairs_must_both_be_in_roi() {
        // Single in-ROI pixel: no pair at any offset.
        let img = q(2, 2, 2, &[1, 0, 0, 0]);
        assert!(matches!(glcm_compute(&img, (0, 1), true), Err(Error::EmptyCooccurrence(0, 1))));
        assert!(glcm_compute(&img, (0, 0), true).is_err());
    }
}
