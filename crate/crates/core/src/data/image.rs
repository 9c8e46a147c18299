use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Grayscale raster, row-major, values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Image2D {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl Image2D {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Shape(format!("image must be non-empty, got {width}x{height}")));
        }
        if pixels.len() != width * height {
            return Err(Error::Shape(format!(
                "{} pixels for a {width}x{height} image",
                pixels.len()
            )));
        }
        if let Some(p) = pixels.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidArgument(format!("pixel value {p} outside [0, 1]")));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// Image whose values are not restricted to `[0, 1]` (wavelet subbands).
    pub(crate) fn unchecked(width: usize, height: usize, pixels: Vec<f64>) -> Self {
        debug_assert_eq!(pixels.len(), width * height);
        Self {
            width,
            height,
            pixels,
        }
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let mut pixels = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                pixels.push(f(r, c));
            }
        }
        Self::new(width, height, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<f64> {
        self.pixels
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.pixels[row * self.width + col]
    }

    pub fn is_binary(&self) -> bool {
        self.pixels.iter().all(|&p| p == 0.0 || p == 1.0)
    }
}

/// Binary region of interest aligned with an [`Image2D`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoiMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl RoiMask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 || bits.len() != width * height {
            return Err(Error::Shape(format!(
                "{} mask bits for a {width}x{height} mask",
                bits.len()
            )));
        }
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    pub fn full(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, vec![true; width * height])
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> bool) -> Result<Self> {
        let mut bits = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                bits.push(f(r, c));
            }
        }
        Self::new(width, height, bits)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bits[row * self.width + col]
    }

    /// Bounds-checked lookup with signed coordinates; outside the raster is unset.
    #[inline]
    pub fn contains(&self, row: isize, col: isize) -> bool {
        row >= 0
            && col >= 0
            && (row as usize) < self.height
            && (col as usize) < self.width
            && self.get(row as usize, col as usize)
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    /// `(row_min, row_max, col_min, col_max)` of the set bits, inclusive.
    pub fn bounding_box(&self) -> Option<(usize, usize, usize, usize)> {
        let mut bb: Option<(usize, usize, usize, usize)> = None;
        for r in 0..self.height {
            for c in 0..self.width {
                if self.get(r, c) {
                    bb = Some(match bb {
                        None => (r, r, c, c),
                        Some((r0, r1, c0, c1)) => (r0.min(r), r1.max(r), c0.min(c), c1.max(c)),
                    });
                }
            }
        }
        bb
    }

    pub fn matches(&self, img: &Image2D) -> bool {
        self.width == img.width && self.height == img.height
    }

    /// Halves the mask; an output bit is set when any bit of its 2×2 block is
    /// set. Odd sizes are edge-replicated first.
    pub fn downsample_any(&self) -> RoiMask {
        let w = self.width.div_ceil(2);
        let h = self.height.div_ceil(2);
        let mut bits = Vec::with_capacity(w * h);
        for r in 0..h {
            for c in 0..w {
                let mut any = false;
                for dr in 0..2 {
                    for dc in 0..2 {
                        let rr = (2 * r + dr).min(self.height - 1);
                        let cc = (2 * c + dc).min(self.width - 1);
                        any |= self.get(rr, cc);
                    }
                }
                bits.push(any);
            }
        }
        RoiMask {
            width: w,
            height: h,
            bits,
        }
    }

    /// Mask with the same geometry shifted by `(dr, dc)`; bits moving off the raster are dropped.
    pub fn shifted(&self, dr: isize, dc: isize) -> RoiMask {
        let mut bits = vec![false; self.bits.len()];
        for r in 0..self.height {
            for c in 0..self.width {
                if self.get(r, c) {
                    let (nr, nc) = (r as isize + dr, c as isize + dc);
                    if nr >= 0 && nc >= 0 && (nr as usize) < self.height && (nc as usize) < self.width
                    {
                        bits[nr as usize * self.width + nc as usize] = true;
                    }
                }
            }
        }
        RoiMask {
            width: self.width,
            height: self.height,
            bits,
        }
    }
}

/// Maps raw integer intensities onto `[0, 1]` by `raw / (2^bit_depth - 1)`.
pub fn normalize_image(width: usize, height: usize, raw: &[u16], bit_depth: u32) -> Result<Image2D> {
    let maxval = match bit_depth {
        8 => 255u16,
        16 => u16::MAX,
        _ => {
            return Err(Error::InvalidArgument(format!(
                "bit depth must be 8 or 16, got {bit_depth}"
            )))
        }
    };
    if let Some(v) = raw.iter().find(|&&v| v > maxval) {
        return Err(Error::InvalidArgument(format!(
            "raw value {v} exceeds {bit_depth}-bit range"
        )));
    }
    let scale = f64::from(maxval);
    Image2D::new(width, height, raw.iter().map(|&v| f64::from(v) / scale).collect())
}

/// `1` where `pixel >= threshold`, else `0`.
pub fn binarize(img: &Image2D, threshold: f64) -> Result<Image2D> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "binarization threshold {threshold} outside (0, 1)"
        )));
    }
    let pixels = img
        .pixels
        .iter()
        .map(|&p| if p >= threshold { 1.0 } else { 0.0 })
        .collect();
    Ok(Image2D::unchecked(img.width, img.height, pixels))
}

/// Crops to the bounding box of the mask; out-of-mask pixels inside the box become 0.
pub fn crop_to_roi(img: &Image2D, mask: &RoiMask) -> Result<Image2D> {
    if !mask.matches(img) {
        return Err(Error::Shape(format!(
            "mask {}x{} vs image {}x{}",
            mask.width, mask.height, img.width, img.height
        )));
    }
    let (r0, r1, c0, c1) = mask.bounding_box().ok_or(Error::EmptyMask)?;
    let (w, h) = (c1 - c0 + 1, r1 - r0 + 1);
    let mut pixels = Vec::with_capacity(w * h);
    for r in r0..=r1 {
        for c in c0..=c1 {
            pixels.push(if mask.get(r, c) { img.get(r, c) } else { 0.0 });
        }
    }
    Ok(Image2D::unchecked(w, h, pixels))
}

/// All `patch`×`patch` windows whose origins are multiples of `stride`, in
/// row-major order of origins.
pub fn extract_patches(img: &Image2D, patch: usize, stride: usize) -> Result<Vec<Image2D>> {
    if patch == 0 || stride == 0 {
        return Err(Error::InvalidArgument("patch size and stride must be >= 1".into()));
    }
    if patch > img.width.min(img.height) {
        return Err(Error::Shape(format!(
            "patch {patch} larger than image {}x{}",
            img.width, img.height
        )));
    }
    let mut out = Vec::new();
    for r0 in (0..=img.height - patch).step_by(stride) {
        for c0 in (0..=img.width - patch).step_by(stride) {
            let mut pixels = Vec::with_capacity(patch * patch);
            for r in r0..r0 + patch {
                pixels.extend_from_slice(&img.pixels[r * img.width + c0..r * img.width + c0 + patch]);
            }
            out.push(Image2D::unchecked(patch, patch, pixels));
        }
    }
    Ok(out)
}

/// Standardizes to `target`×`target`: area-average by the smallest integer
/// factor that fits both sides, then zero-pad centered.
pub fn resize_or_pad(img: &Image2D, target: usize) -> Result<Image2D> {
    if target == 0 {
        return Err(Error::InvalidArgument("target size must be >= 1".into()));
    }
    if img.width == target && img.height == target {
        return Ok(img.clone());
    }
    let factor = img.width.max(img.height).div_ceil(target).max(1);
    let src = if factor > 1 {
        area_downsample(img, factor)
    } else {
        img.clone()
    };
    let top = (target - src.height) / 2;
    let left = (target - src.width) / 2;
    let mut pixels = vec![0.0; target * target];
    for r in 0..src.height {
        let dst = (top + r) * target + left;
        pixels[dst..dst + src.width].copy_from_slice(&src.pixels[r * src.width..(r + 1) * src.width]);
    }
    Ok(Image2D::unchecked(target, target, pixels))
}

// Partial blocks at the right/bottom edges average over the pixels they contain.
fn area_downsample(img: &Image2D, factor: usize) -> Image2D {
    let w = img.width.div_ceil(factor);
    let h = img.height.div_ceil(factor);
    let mut pixels = Vec::with_capacity(w * h);
    for r in 0..h {
        for c in 0..w {
            let (r_end, c_end) = (((r + 1) * factor).min(img.height), ((c + 1) * factor).min(img.width));
            let mut sum = 0.0;
            for rr in r * factor..r_end {
                for cc in c * factor..c_end {
                    sum += img.get(rr, cc);
                }
            }
            pixels.push(sum / ((r_end - r * factor) * (c_end - c * factor)) as f64);
        }
    }
    Image2D::unchecked(w, h, pixels)
}
