//! Single-level orthonormal 2D Haar transform.
//!
//! For each 2×2 block `[a b; c d]`:
//!
//! ```text
//! LL = (a + b + c + d) / 2      LH = (a + b - c - d) / 2
//! HL = (a - b + c - d) / 2      HH = (a - b - c + d) / 2
//! ```
//!
//! `LH` responds to vertical change (horizontal edges), `HL` to horizontal
//! change. Odd sides are padded by replicating the last row/column.

use super::Raster;
use crate::data::Image2D;

/// Real-valued raster without the `[0, 1]` restriction of [`Image2D`].
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    pub width: usize,
    pub height: usize,
    pub values: Vec<f64>,
}

impl Raster for Plane {
    fn width(&self) -> usize {
        self.width
    }
    fn height(&self) -> usize {
        self.height
    }
    fn values(&self) -> &[f64] {
        &self.values
    }
}

impl Plane {
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HaarSubbands {
    pub ll: Plane,
    pub lh: Plane,
    pub hl: Plane,
    pub hh: Plane,
}

impl HaarSubbands {
    /// `[("LL", ll), ("LH", lh), ("HL", hl), ("HH", hh)]`.
    pub fn named(&self) -> [(&'static str, &Plane); 4] {
        [("LL", &self.ll), ("LH", &self.lh), ("HL", &self.hl), ("HH", &self.hh)]
    }
}

/// Edge-replicated copy with even sides.
pub fn pad_even(img: &Image2D) -> Plane {
    let (w, h) = (img.width(), img.height());
    let (pw, ph) = (w + w % 2, h + h % 2);
    let mut values = Vec::with_capacity(pw * ph);
    for r in 0..ph {
        for c in 0..pw {
            values.push(img.get(r.min(h - 1), c.min(w - 1)));
        }
    }
    Plane {
        width: pw,
        height: ph,
        values,
    }
}

pub fn wavelet_decompose(img: &Image2D) -> HaarSubbands {
    let src = pad_even(img);
    let (w, h) = (src.width / 2, src.height / 2);
    let mut bands = [(); 4].map(|_| Vec::with_capacity(w * h));
    for r in 0..h {
        for c in 0..w {
            let at = |dr: usize, dc: usize| src.values[(2 * r + dr) * src.width + 2 * c + dc];
            let (a, b, cc, d) = (at(0, 0), at(0, 1), at(1, 0), at(1, 1));
            bands[0].push(0.5 * (a + b + cc + d));
            bands[1].push(0.5 * (a + b - cc - d));
            bands[2].push(0.5 * (a - b + cc - d));
            bands[3].push(0.5 * (a - b - cc + d));
        }
    }
    let [ll, lh, hl, hh] = bands.map(|values| Plane {
        width: w,
        height: h,
        values,
    });
    HaarSubbands { ll, lh, hl, hh }
}

/// Inverse transform; returns the padded (even-sided) raster.
pub fn wavelet_reconstruct(bands: &HaarSubbands) -> Plane {
    let (w, h) = (bands.ll.width, bands.ll.height);
    let (ow, oh) = (2 * w, 2 * h);
    let mut values = vec![0.0; ow * oh];
    for r in 0..h {
        for c in 0..w {
            let i = r * w + c;
            let (ll, lh, hl, hh) = (
                bands.ll.values[i],
                bands.lh.values[i],
                bands.hl.values[i],
                bands.hh.values[i],
            );
            values[2 * r * ow + 2 * c] = 0.5 * (ll + lh + hl + hh);
            values[2 * r * ow + 2 * c + 1] = 0.5 * (ll + lh - hl - hh);
            values[(2 * r + 1) * ow + 2 * c] = 0.5 * (ll - lh + hl - hh);
            values[(2 * r + 1) * ow + 2 * c + 1] = 0.5 * (ll - lh - hl + hh);
        }
    }
    Plane {
        width: ow,
        height: oh,
        values,
    }
}
