use super::{entropy_bits, in_roi_values, FeatureVector, Raster};
use crate::data::RoiMask;
use crate::error::Result;

const HISTOGRAM_BINS: usize = 256;
// Central moments below this are treated as an exactly constant region.
const DEGENERATE_VARIANCE: f64 = 1e-20;

/// Nearest-rank percentile of sorted values.
fn percentile(sorted: &[f64], pct: f64) -> f64 {
    let rank = (pct / 100.0 * sorted.len() as f64).ceil().max(1.0) as usize;
    sorted[rank.min(sorted.len()) - 1]
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Thirteen intensity statistics over the in-ROI pixels.
pub fn first_order_features<R: Raster + ?Sized>(img: &R, mask: &RoiMask) -> Result<FeatureVector> {
    let mut vals = in_roi_values(img, mask)?;
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4, mut mad) = (0.0, 0.0, 0.0, 0.0);
    for &v in &vals {
        let d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
        mad += d.abs();
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    mad /= n;
    let degenerate = m2 <= DEGENERATE_VARIANCE;
    let (variance, skewness, kurtosis) = if degenerate {
        (m2, 0.0, 0.0)
    } else {
        (m2, m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0)
    };
    let energy = vals.iter().map(|v| v * v).sum::<f64>();

    vals.sort_by(f64::total_cmp);
    let (lo, hi) = (vals[0], vals[vals.len() - 1]);
    let entropy = if hi > lo {
        let mut hist = [0usize; HISTOGRAM_BINS];
        for &v in &vals {
            let b = ((v - lo) / (hi - lo) * HISTOGRAM_BINS as f64).floor() as usize;
            hist[b.min(HISTOGRAM_BINS - 1)] += 1;
        }
        let probs: Vec<f64> = hist.iter().map(|&c| c as f64 / n).collect();
        entropy_bits(&probs)
    } else {
        0.0
    };

    let mut fv = FeatureVector::default();
    fv.push("mean", mean);
    fv.push("variance", variance);
    fv.push("skewness", skewness);
    fv.push("kurtosis", kurtosis);
    fv.push("energy", energy);
    fv.push("entropy", entropy);
    fv.push("minimum", lo);
    fv.push("maximum", hi);
    fv.push("range", hi - lo);
    fv.push("median", median(&vals));
    fv.push("p10", percentile(&vals, 10.0));
    fv.push("p90", percentile(&vals, 90.0));
    fv.push("mad", mad);
    Ok(fv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Image2D;

    fn features(vals: &[f64]) -> FeatureVector {
        let img = Image2D::new(vals.len(), 1, vals.to_vec()).unwrap();
        first_order_features(&img, &RoiMask::full(vals.len(), 1).unwrap()).unwrap()
    }

    #[test]
    fn constant_region() {
        let f = features(&[0.5; 7]);
        assert_eq!(f.len(), 13);
        assert_eq!(f.get("mean"), Some(0.5));
        assert_eq!(f.get("variance"), Some(0.0));
        assert_eq!(f.get("skewness"), Some(0.0));
        assert_eq!(f.get("kurtosis"), Some(0.0));
        assert_eq!(f.get("range"), Some(0.0));
        assert_eq!(f.get("entropy"), Some(0.0));
    }

    #[test]
    fn two_point_distribution() {
        let f = features(&[0.0, 1.0, 0.0, 1.0]);
        assert_eq!(f.get("mean"), Some(0.5));
        assert_eq!(f.get("variance"), Some(0.25));
        assert_eq!(f.get("skewness"), Some(0.0));
        // m4 / m2² = 0.0625 / 0.0625
        assert_eq!(f.get("kurtosis"), Some(-2.0));
        assert_eq!(f.get("entropy"), Some(1.0));
        assert_eq!(f.get("mad"), Some(0.5));
    }

    #[test]
    fn order_statistics() {
        let f = features(&[0.4, 0.1, 0.3, 0.2]);
        assert!((f.get("median").unwrap() - 0.25).abs() < 1e-15);
        // ranks ceil(0.4) = 1 and ceil(3.6) = 4
        assert_eq!(f.get("p10"), Some(0.1));
        assert_eq!(f.get("p90"), Some(0.4));
        assert_eq!(f.get("minimum"), Some(0.1));
        assert_eq!(f.get("maximum"), Some(0.4));
    }

    #[test]
    fn values_one_to_four_median() {
        let vals: Vec<f64> = [1.0, 2.0, 3.0, 4.0].iter().map(|v| v / 4.0).collect();
        assert!((features(&vals).get("median").unwrap() - 2.5 / 4.0).abs() < 1e-15);
    }

    #[test]
    fn permutation_invariant() {
        let a = features(&[0.9, 0.1, 0.35, 0.6, 0.2]);
        let b = features(&[0.2, 0.6, 0.9, 0.35, 0.1]);
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
