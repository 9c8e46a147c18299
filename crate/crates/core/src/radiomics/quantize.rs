use super::{in_roi_values, Raster};
use crate::data::RoiMask;
use crate::error::{Error, Result};

/// Gray levels `1..=levels` for in-ROI pixels, `0` outside the ROI.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedImage {
    pub width: usize,
    pub height: usize,
    pub levels: usize,
    pub codes: Vec<u16>,
    pub roi: RoiMask,
}

impl QuantizedImage {
    /// Level at `(row, col)`, or `None` outside the raster or the ROI.
    #[inline]
    pub fn code(&self, row: isize, col: isize) -> Option<u16> {
        if row < 0 || col < 0 || row as usize >= self.height || col as usize >= self.width {
            return None;
        }
        let c = self.codes[row as usize * self.width + col as usize];
        (c > 0).then_some(c)
    }

    /// Builds a quantized image from explicit codes; `0` marks out-of-ROI pixels.
    pub fn from_codes(width: usize, height: usize, levels: usize, codes: Vec<u16>) -> Result<Self> {
        if codes.len() != width * height {
            return Err(Error::Shape(format!("{} codes for {width}x{height}", codes.len())));
        }
        if let Some(c) = codes.iter().find(|&&c| c as usize > levels) {
            return Err(Error::InvalidArgument(format!("code {c} exceeds {levels} levels")));
        }
        let roi = RoiMask::new(width, height, codes.iter().map(|&c| c > 0).collect())?;
        Ok(Self {
            width,
            height,
            levels,
            codes,
            roi,
        })
    }
}

/// Equal-width binning of in-ROI values between their minimum and maximum;
/// a constant region maps to level 1.
pub fn quantize<R: Raster + ?Sized>(img: &R, mask: &RoiMask, levels: usize) -> Result<QuantizedImage> {
    if levels < 2 || levels > u16::MAX as usize {
        return Err(Error::InvalidArgument(format!("quantization levels {levels}")));
    }
    let vals = in_roi_values(img, mask)?;
    let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = hi - lo;
    let codes = img
        .values()
        .iter()
        .zip(mask.bits())
        .map(|(&v, &inside)| {
            if !inside {
                0
            } else if range <= 0.0 {
                1
            } else {
                let bin = ((v - lo) / range * levels as f64).floor() as usize;
                (bin.min(levels - 1) + 1) as u16
            }
        })
        .collect();
    Ok(QuantizedImage {
        width: img.width(),
        height: img.height(),
        levels,
        codes,
        roi: mask.clone(),
    })
}
