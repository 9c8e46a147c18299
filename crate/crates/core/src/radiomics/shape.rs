use std::f64::consts::PI;

use super::FeatureVector;
use crate::data::RoiMask;
use crate::error::{Error, Result};

/// Nine 2D shape descriptors of the mask.
///
/// The perimeter counts pixel edges between a set pixel and an unset (or
/// off-raster) neighbour. Axis lengths are `4·sqrt(λ)` for the eigenvalues
/// of the pixel-coordinate covariance.
pub fn shape_features(mask: &RoiMask) -> Result<FeatureVector> {
    let (r0, r1, c0, c1) = mask.bounding_box().ok_or(Error::EmptyMask)?;
    let area = mask.count() as f64;
    let mut perimeter = 0usize;
    let (mut sr, mut sc) = (0.0, 0.0);
    for r in 0..mask.height() {
        for c in 0..mask.width() {
            if !mask.get(r, c) {
                continue;
            }
            let (ri, ci) = (r as isize, c as isize);
            perimeter += [(-1, 0), (1, 0), (0, -1), (0, 1)]
                .iter()
                .filter(|(dr, dc)| !mask.contains(ri + dr, ci + dc))
                .count();
            sr += r as f64;
            sc += c as f64;
        }
    }
    let (mr, mc) = (sr / area, sc / area);
    let (mut mu20, mut mu02, mut mu11) = (0.0, 0.0, 0.0);
    for r in r0..=r1 {
        for c in c0..=c1 {
            if mask.get(r, c) {
                let (dr, dc) = (r as f64 - mr, c as f64 - mc);
                mu20 += dc * dc;
                mu02 += dr * dr;
                mu11 += dr * dc;
            }
        }
    }
    let (a, b, cxy) = (mu20 / area, mu02 / area, mu11 / area);
    let half_trace = 0.5 * (a + b);
    let disc = (0.25 * (a - b) * (a - b) + cxy * cxy).sqrt();
    let l1 = half_trace + disc;
    let l2 = (half_trace - disc).max(0.0);
    let eccentricity = if l1 > 0.0 { (1.0 - l2 / l1).sqrt() } else { 0.0 };

    let perimeter = perimeter as f64;
    let (bw, bh) = ((c1 - c0 + 1) as f64, (r1 - r0 + 1) as f64);
    let mut fv = FeatureVector::default();
    fv.push("area", area);
    fv.push("perimeter", perimeter);
    fv.push("compactness", 4.0 * PI * area / (perimeter * perimeter));
    fv.push("bbox_width", bw);
    fv.push("bbox_height", bh);
    fv.push("extent", area / (bw * bh));
    fv.push("major_axis_length", 4.0 * l1.sqrt());
    fv.push("minor_axis_length", 4.0 * l2.sqrt());
    fv.push("eccentricity", eccentricity);
    Ok(fv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_pixel() {
        let m = RoiMask::from_fn(5, 5, |r, c| r == 2 && c == 3).unwrap();
        let f = shape_features(&m).unwrap();
        assert_eq!(f.len(), 9);
        assert_eq!(f.get("area"), Some(1.0));
        assert_eq!(f.get("perimeter"), Some(4.0));
        assert_eq!(f.get("extent"), Some(1.0));
        assert_eq!(f.get("eccentricity"), Some(0.0));
    }

    #[test]
    fn full_square() {
        for k in 1..6 {
            let f = shape_features(&RoiMask::full(k, k).unwrap()).unwrap();
            assert_eq!(f.get("area"), Some((k * k) as f64));
            assert_eq!(f.get("perimeter"), Some(4.0 * k as f64));
            assert_eq!(f.get("extent"), Some(1.0));
        }
    }

    #[test]
    fn elongated_rectangle() {
        // 10 wide, 2 tall: column variance (100-1)/12, row variance (4-1)/12.
        let m = RoiMask::from_fn(12, 6, |r, c| (2..4).contains(&r) && (1..11).contains(&c)).unwrap();
        let f = shape_features(&m).unwrap();
        let major = f.get("major_axis_length").unwrap();
        let minor = f.get("minor_axis_length").unwrap();
        assert!((major - 4.0 * (99.0f64 / 12.0).sqrt()).abs() < 1e-12);
        assert!((minor - 4.0 * (3.0f64 / 12.0).sqrt()).abs() < 1e-12);
        let e = f.get("eccentricity").unwrap();
        assert!(e > 0.0 && e < 1.0);
        assert!((e - (1.0 - 3.0 / 99.0f64).sqrt()).abs() < 1e-12);
        assert_eq!(f.get("perimeter"), Some(24.0));
    }

    #[test]
    fn empty_mask_errors() {
        let m = RoiMask::new(2, 2, vec![false; 4]).unwrap();
        assert!(matches!(shape_features(&m), Err(Error::EmptyMask)));
    }
}
