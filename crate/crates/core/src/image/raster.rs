use std::path::Path;

use super::hsv::{rgb_to_hsv, Hsv};
use crate::error::{Error, Result};

/// An 8-bit RGB image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterImage {
    width: u32,
    height: u32,
    pixels: Vec<[u8; 3]>,
}

impl RasterImage {
    pub fn new(width: u32, height: u32, pixels: Vec<[u8; 3]>) -> Result<Self> {
        if pixels.len() as u64 != u64::from(width) * u64::from(height) {
            return Err(Error::data(format!(
                "{}x{} image needs {} pixels, got {}",
                width,
                height,
                u64::from(width) * u64::from(height),
                pixels.len()
            )));
        }
        Ok(RasterImage { width, height, pixels })
    }

    pub fn solid(width: u32, height: u32, rgb: [u8; 3]) -> Self {
        RasterImage { width, height, pixels: vec![rgb; width as usize * height as usize] }
    }

    /// Decodes PNG, JPEG, BMP, or WebP bytes.
    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let img = image::load_from_memory(bytes).map_err(|e| Error::data(format!("undecodable image: {e}")))?;
        let rgb = img.to_rgb8();
        let (width, height) = rgb.dimensions();
        let pixels = rgb.pixels().map(|p| p.0).collect();
        Self::new(width, height, pixels)
    }

    pub fn open(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::decode(&bytes).map_err(|e| match e {
            Error::Data(m) => Error::data(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }

    pub fn pixel_count(&self) -> usize {
        self.pixels.len()
    }

    pub fn hsv_pixels(&self) -> impl Iterator<Item = Hsv> + '_ {
        self.pixels.iter().map(|&[r, g, b]| rgb_to_hsv(r, g, b))
    }

    /// Encodes as PNG; used to build fixtures.
    pub fn to_png(&self) -> Result<Vec<u8>> {
        let flat: Vec<u8> = self.pixels.iter().flatten().copied().collect();
        let buf = image::RgbImage::from_raw(self.width, self.height, flat)
            .ok_or_else(|| Error::data("pixel buffer size mismatch"))?;
        let mut out = std::io::Cursor::new(Vec::new());
        buf.write_to(&mut out, image::ImageFormat::Png).map_err(|e| Error::data(format!("png encode: {e}")))?;
        Ok(out.into_inner())
    }
}

/// Arithmetic channel means. Hue is averaged linearly in degrees, so
/// reds on both sides of 0 average toward cyan. Pixels are grouped by
/// color and weighted by frequency, so a constant image reproduces its
/// pixel's HSV exactly.
pub fn average_hsv(img: &RasterImage) -> Result<Hsv> {
    let n = img.pixel_count();
    if n == 0 {
        return Err(Error::data("average of a zero-pixel image"));
    }
    let mut counts: std::collections::BTreeMap<[u8; 3], u64> = std::collections::BTreeMap::new();
    for &px in img.pixels() {
        *counts.entry(px).or_insert(0) += 1;
    }
    let n = n as f64;
    let (mut h, mut s, mut v) = (0.0, 0.0, 0.0);
    for ([r, g, b], count) in counts {
        let w = count as f64 / n;
        let p = rgb_to_hsv(r, g, b);
        h += w * p.h;
        s += w * p.s;
        v += w * p.v;
    }
    Ok(Hsv { h: h.clamp(0.0, 360.0), s: s.clamp(0.0, 1.0), v: v.clamp(0.0, 1.0) })
}
