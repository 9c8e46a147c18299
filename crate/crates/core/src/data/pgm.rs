//! Binary PGM (P5) rasters, 8-bit or big-endian 16-bit.

use std::fs;
use std::path::Path;

use super::image::{normalize_image, Image2D, RoiMask};
use crate::error::{Error, Result};

/// Raw decoded raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawRaster {
    pub width: usize,
    pub height: usize,
    pub bit_depth: u32,
    pub values: Vec<u16>,
}

fn header_token<'a>(bytes: &'a [u8], pos: &mut usize) -> Option<&'a [u8]> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    (start < *pos).then(|| &bytes[start..*pos])
}

/// Decodes a P5 byte stream.
pub fn decode(bytes: &[u8]) -> std::result::Result<RawRaster, String> {
    let mut pos = 0;
    if header_token(bytes, &mut pos) != Some(b"P5".as_slice()) {
        return Err("missing P5 magic".into());
    }
    let mut num = |what: &str| -> std::result::Result<usize, String> {
        let tok = header_token(bytes, &mut pos).ok_or_else(|| format!("missing {what}"))?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| format!("bad {what}"))
    };
    let width = num("width")?;
    let height = num("height")?;
    let maxval = num("maxval")?;
    if width == 0 || height == 0 {
        return Err(format!("degenerate size {width}x{height}"));
    }
    let bit_depth = match maxval {
        255 => 8,
        65535 => 16,
        m => return Err(format!("unsupported maxval {m} (expected 255 or 65535)")),
    };
    // Exactly one whitespace byte separates the header from the raster.
    pos += 1;
    let n = width * height;
    let data = bytes.get(pos..).unwrap_or_default();
    let values: Vec<u16> = if bit_depth == 8 {
        if data.len() < n {
            return Err(format!("truncated raster: {} of {n} bytes", data.len()));
        }
        data[..n].iter().map(|&b| u16::from(b)).collect()
    } else {
        if data.len() < 2 * n {
            return Err(format!("truncated raster: {} of {} bytes", data.len(), 2 * n));
        }
        data[..2 * n]
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]))
            .collect()
    };
    Ok(RawRaster {
        width,
        height,
        bit_depth,
        values,
    })
}

pub fn encode(raster: &RawRaster) -> Vec<u8> {
    let maxval: u32 = if raster.bit_depth == 8 { 255 } else { 65535 };
    let mut out = format!("P5\n{} {}\n{}\n", raster.width, raster.height, maxval).into_bytes();
    if raster.bit_depth == 8 {
        out.extend(raster.values.iter().map(|&v| v.min(255) as u8));
    } else {
        for &v in &raster.values {
            out.extend_from_slice(&v.to_be_bytes());
        }
    }
    out
}

/// Quantizes an image to the given bit depth (round to nearest).
pub fn to_raw(img: &Image2D, bit_depth: u32) -> Result<RawRaster> {
    let maxval = match bit_depth {
        8 => 255.0,
        16 => 65535.0,
        _ => return Err(Error::InvalidArgument(format!("bit depth {bit_depth}"))),
    };
    Ok(RawRaster {
        width: img.width(),
        height: img.height(),
        bit_depth,
        values: img.pixels().iter().map(|&p| (p * maxval).round() as u16).collect(),
    })
}

fn read_raw(path: &Path) -> Result<RawRaster> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes).map_err(|reason| Error::Pgm {
        path: path.to_path_buf(),
        reason,
    })
}

pub fn read_image(path: &Path) -> Result<Image2D> {
    let raw = read_raw(path)?;
    normalize_image(raw.width, raw.height, &raw.values, raw.bit_depth)
}

/// Any pixel above zero is set.
pub fn read_mask(path: &Path) -> Result<RoiMask> {
    let raw = read_raw(path)?;
    RoiMask::new(raw.width, raw.height, raw.values.iter().map(|&v| v > 0).collect())
}

pub fn write_image(path: &Path, img: &Image2D, bit_depth: u32) -> Result<()> {
    let raw = to_raw(img, bit_depth)?;
    fs::write(path, encode(&raw)).map_err(|e| Error::io(path, e))
}

pub fn write_mask(path: &Path, mask: &RoiMask) -> Result<()> {
    let raw = RawRaster {
        width: mask.width(),
        height: mask.height(),
        bit_depth: 8,
        values: mask.bits().iter().map(|&b| if b { 255 } else { 0 }).collect(),
    };
    fs::write(path, encode(&raw)).map_err(|e| Error::io(path, e))
}
