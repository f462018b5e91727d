use std::path::Path;

use serde::{Deserialize, Serialize};

use super::hsv::Hsv;
use super::raster::RasterImage;
use crate::error::{Error, Result};
use crate::features::FeatureVector;

const DEFAULT_PALETTE: &str = include_str!("../../config/color_palette.csv");

pub const PALETTE_SIZE: usize = 30;

/// A named HSV box. Saturation and value intervals are half-open except
/// that an upper bound of 1 is inclusive; the hue band is
/// `[center - tol, center + tol)` measured around the circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColorEntry {
    pub name: String,
    pub h_center: f64,
    pub h_tol: f64,
    pub s_min: f64,
    pub s_max: f64,
    pub v_min: f64,
    pub v_max: f64,
}

fn in_unit_interval(x: f64, lo: f64, hi: f64) -> bool {
    (x >= lo && x < hi) || (hi >= 1.0 && x == 1.0 && lo <= 1.0)
}

impl ColorEntry {
    pub fn contains(&self, p: Hsv) -> bool {
        if !in_unit_interval(p.s, self.s_min, self.s_max) || !in_unit_interval(p.v, self.v_min, self.v_max) {
            return false;
        }
        if self.h_tol >= 180.0 {
            return true;
        }
        let offset = (p.h - self.h_center + 180.0).rem_euclid(360.0) - 180.0;
        offset >= -self.h_tol && offset < self.h_tol
    }

    fn validate(&self) -> Result<()> {
        let ok = self.h_center.is_finite()
            && self.h_tol > 0.0
            && self.h_tol <= 180.0
            && 0.0 <= self.s_min
            && self.s_min < self.s_max
            && self.s_max <= 1.0
            && 0.0 <= self.v_min
            && self.v_min < self.v_max
            && self.v_max <= 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::config(format!("palette entry `{}` has malformed intervals", self.name)))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColorPalette {
    entries: Vec<ColorEntry>,
}

impl ColorPalette {
    pub fn new(entries: Vec<ColorEntry>) -> Result<Self> {
        if entries.len() != PALETTE_SIZE {
            return Err(Error::config(format!("palette has {} entries, expected {PALETTE_SIZE}", entries.len())));
        }
        let mut names = std::collections::HashSet::new();
        for e in &entries {
            e.validate()?;
            if !names.insert(e.name.as_str()) {
                return Err(Error::config(format!("duplicate palette entry `{}`", e.name)));
            }
        }
        Ok(ColorPalette { entries })
    }

    /// Reads the `name,h_center,h_tol,s_min,s_max,v_min,v_max` table.
    pub fn parse(text: &str) -> Result<Self> {
        let body: String = text
            .lines()
            .filter(|l| !l.trim_start().starts_with('#') && !l.trim().is_empty())
            .map(|l| format!("{l}\n"))
            .collect();
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(body.as_bytes());
        let entries = reader
            .deserialize::<ColorEntry>()
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::config(format!("palette: {e}")))?;
        Self::new(entries)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn entries(&self) -> &[ColorEntry] {
        &self.entries
    }

    pub fn names(&self) -> Vec<String> {
        self.entries.iter().map(|e| format!("image.color.{}", e.name)).collect()
    }
}

impl Default for ColorPalette {
    fn default() -> Self {
        Self::parse(DEFAULT_PALETTE).expect("bundled palette parses")
    }
}

/// Share of pixels inside `entry`.
pub fn color_fraction(img: &RasterImage, entry: &ColorEntry) -> f64 {
    let n = img.pixel_count();
    if n == 0 {
        return 0.0;
    }
    img.hsv_pixels().filter(|&p| entry.contains(p)).count() as f64 / n as f64
}

/// [`color_fraction`] for every palette entry, in palette order.
pub fn color_profile(img: &RasterImage, palette: &ColorPalette) -> FeatureVector {
    let n = img.pixel_count();
    let mut counts = vec![0u64; palette.entries.len()];
    for p in img.hsv_pixels() {
        for (c, e) in counts.iter_mut().zip(&palette.entries) {
            if e.contains(p) {
                *c += 1;
            }
        }
    }
    FeatureVector {
        names: palette.names(),
        values: counts.into_iter().map(|c| if n == 0 { 0.0 } else { c as f64 / n as f64 }).collect(),
    }
}
