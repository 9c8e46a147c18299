use serde::{Deserialize, Serialize};

use super::{FeatureVector, QuantizedImage};
use crate::error::{Error, Result};

/// Run counts by level and length; cell `(g, len)` is stored at
/// `(g-1)·max_run + (len-1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Glrlm {
    pub levels: usize,
    pub max_run: usize,
    pub direction: (isize, isize),
    pub counts: Vec<u64>,
}

impl Glrlm {
    pub fn at(&self, level: usize, len: usize) -> u64 {
        self.counts[(level - 1) * self.max_run + (len - 1)]
    }

    pub fn total_runs(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `Σ len · count`, which equals the number of in-ROI pixels.
    pub fn total_pixels(&self) -> u64 {
        self.counts
            .chunks(self.max_run)
            .flat_map(|row| row.iter().enumerate().map(|(j, &c)| (j as u64 + 1) * c))
            .sum()
    }
}

/// Maximal runs of equal levels along `direction`; pixels outside the ROI
/// terminate a run.
pub fn glrlm_compute(q: &QuantizedImage, direction: (isize, isize)) -> Result<Glrlm> {
    if !super::DIRECTIONS.contains(&direction) {
        return Err(Error::InvalidArgument(format!(
            "run direction {direction:?} not one of {:?}",
            super::DIRECTIONS
        )));
    }
    if q.roi.is_empty() {
        return Err(Error::EmptyMask);
    }
    let max_run = q.width.max(q.height);
    let mut counts = vec![0u64; q.levels * max_run];
    let (dr, dc) = direction;
    for r in 0..q.height as isize {
        for c in 0..q.width as isize {
            let Some(level) = q.code(r, c) else { continue };
            // Only start at the first pixel of a run.
            if q.code(r - dr, c - dc) == Some(level) {
                continue;
            }
            let mut len = 1;
            while q.code(r + dr * len as isize, c + dc * len as isize) == Some(level) {
                len += 1;
            }
            counts[(level as usize - 1) * max_run + len - 1] += 1;
        }
    }
    Ok(Glrlm {
        levels: q.levels,
        max_run,
        direction,
        counts,
    })
}

pub(crate) const GLRLM_FEATURE_NAMES: [&str; 7] = ["sre", "lre", "gln", "rln", "rp", "lgre", "hgre"];

/// Short/long run emphasis, gray-level and run-length non-uniformity, run
/// percentage, low/high gray-level run emphasis.
pub fn glrlm_features(r: &Glrlm) -> Result<FeatureVector> {
    let n_runs = r.total_runs() as f64;
    if n_runs == 0.0 {
        return Err(Error::Empty("run-length matrix has no runs".into()));
    }
    let (mut sre, mut lre, mut lgre, mut hgre) = (0.0, 0.0, 0.0, 0.0);
    let mut by_level = vec![0.0; r.levels];
    let mut by_len = vec![0.0; r.max_run];
    for g in 1..=r.levels {
        for len in 1..=r.max_run {
            let p = r.at(g, len) as f64;
            if p == 0.0 {
                continue;
            }
            let (fg, fl) = (g as f64, len as f64);
            sre += p / (fl * fl);
            lre += p * fl * fl;
            lgre += p / (fg * fg);
            hgre += p * fg * fg;
            by_level[g - 1] += p;
            by_len[len - 1] += p;
        }
    }
    let gln = by_level.iter().map(|x| x * x).sum::<f64>() / n_runs;
    let rln = by_len.iter().map(|x| x * x).sum::<f64>() / n_runs;
    let rp = n_runs / r.total_pixels() as f64;
    let values = [sre / n_runs, lre / n_runs, gln, rln, rp, lgre / n_runs, hgre / n_runs];
    Ok(FeatureVector {
        names: GLRLM_FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
        values: values.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(width: usize, height: usize, levels: usize, codes: &[u16]) -> QuantizedImage {
        QuantizedImage::from_codes(width, height, levels, codes.to_vec()).unwrap()
    }

    #[test]
    fn single_row_runs() {
        let one = glrlm_compute(&q(4, 1, 2, &[1, 1, 1, 1]), (0, 1)).unwrap();
        assert_eq!(one.at(1, 4), 1);
        assert_eq!(one.total_runs(), 1);
        let f = glrlm_features(&one).unwrap();
        assert_eq!(f.get("rp"), Some(0.25));

        let two = glrlm_compute(&q(4, 1, 2, &[1, 1, 2, 2]), (0, 1)).unwrap();
        assert_eq!((two.at(1, 2), two.at(2, 2), two.total_runs()), (1, 1, 2));
        // Two runs of length 2 at levels 1 and 2.
        let f = glrlm_features(&two).unwrap();
        let expect = [
            ("sre", 0.25),
            ("lre", 4.0),
            ("gln", 1.0),
            ("rln", 2.0),
            ("rp", 0.5),
            ("lgre", (1.0 + 0.25) / 2.0),
            ("hgre", (1.0 + 4.0) / 2.0),
        ];
        for (name, v) in expect {
            assert!((f.get(name).unwrap() - v).abs() < 1e-15, "{name}");
        }
    }

    #[test]
    fn diagonal_runs_of_constant_square() {
        let g = glrlm_compute(&q(3, 3, 2, &[1; 9]), (1, 1)).unwrap();
        assert_eq!((g.at(1, 1), g.at(1, 2), g.at(1, 3)), (2, 2, 1));
        let anti = glrlm_compute(&q(3, 3, 2, &[1; 9]), (1, -1)).unwrap();
        assert_eq!(anti.counts, g.counts);
    }

    #[test]
    fn unit_runs() {
        let g = glrlm_compute(&q(4, 1, 2, &[1, 2, 1, 2]), (0, 1)).unwrap();
        let f = glrlm_features(&g).unwrap();
        assert_eq!(f.get("sre"), Some(1.0));
        assert_eq!(f.get("lre"), Some(1.0));
        assert_eq!(f.get("rp"), Some(1.0));
    }

    #[test]
    fn roi_gap_breaks_run() {
        let g = glrlm_compute(&q(5, 1, 2, &[1, 1, 0, 1, 1]), (0, 1)).unwrap();
        assert_eq!(g.at(1, 2), 2);
        assert_eq!(g.total_pixels(), 4);
    }

    #[test]
    fn errors() {
        assert!(glrlm_compute(&q(2, 1, 2, &[1, 1]), (0, 2)).is_err());
        assert!(matches!(glrlm_compute(&q(2, 1, 2, &[0, 0]), (0, 1)), Err(Error::EmptyMask)));
        let empty = Glrlm {
            levels: 2,
            max_run: 2,
            direction: (0, 1),
            counts: vec![0; 4],
        };
        assert!(glrlm_features(&empty).is_err());
    }
}
