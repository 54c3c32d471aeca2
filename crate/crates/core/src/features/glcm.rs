//! Gray-level co-occurrence matrices and the texture features derived from
//! them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::session::Frame;

pub const ALLOWED_LEVELS: [u32; 4] = [8, 16, 32, 64];
pub const DEFAULT_OFFSETS: [(i32, i32); 4] = [(1, 0), (0, 1), (1, 1), (-1, 1)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Roi {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

impl Roi {
    pub fn check(&self, width: u32, height: u32) -> Result<()> {
        let fits = self.w > 0
            && self.h > 0
            && self.x.checked_add(self.w).is_some_and(|r| r <= width)
            && self.y.checked_add(self.h).is_some_and(|b| b <= height);
        if fits {
            Ok(())
        } else {
            Err(Error::RoiOutOfBounds {
                x: self.x,
                y: self.y,
                w: self.w,
                h: self.h,
                width,
                height,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GlcmConfig {
    pub levels: u32,
    pub offsets: Vec<(i32, i32)>,
    pub symmetric: bool,
    pub roi: Option<Roi>,
}

impl Default for GlcmConfig {
    fn default() -> Self {
        Self {
            levels: 32,
            offsets: DEFAULT_OFFSETS.to_vec(),
            symmetric: true,
            roi: None,
        }
    }
}

impl GlcmConfig {
    pub fn validate(&self) -> Result<()> {
        check_levels(self.levels)?;
        if self.offsets.is_empty() {
            return Err(Error::Config("at least one GLCM offset is required".into()));
        }
        if self.offsets.contains(&(0, 0)) {
            return Err(Error::Config("GLCM offset (0, 0) is not allowed".into()));
        }
        Ok(())
    }

    pub fn validate_for(&self, width: u32, height: u32) -> Result<()> {
        self.validate()?;
        if let Some(roi) = &self.roi {
            roi.check(width, height)?;
        }
        Ok(())
    }
}

fn check_levels(levels: u32) -> Result<()> {
    if ALLOWED_LEVELS.contains(&levels) {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "levels must be one of 8, 16, 32, 64 (got {levels})"
        )))
    }
}

/// Image of gray levels in `0..levels`, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantizedImage {
    pub width: usize,
    pub height: usize,
    pub levels: u32,
    pub data: Vec<u8>,
}

impl QuantizedImage {
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }
}

/// Maps intensity `p` to `floor(p · levels / 256)` over `roi` (or the full
/// frame).
pub fn quantize_pixels(
    pixels: &[u8],
    width: u32,
    height: u32,
    levels: u32,
    roi: Option<Roi>,
) -> Result<QuantizedImage> {
    check_levels(levels)?;
    let roi = roi.unwrap_or(Roi {
        x: 0,
        y: 0,
        w: width,
        h: height,
    });
    roi.check(width, height)?;
    let shift = 8 - levels.trailing_zeros();
    let (w, h) = (roi.w as usize, roi.h as usize);
    let mut data = Vec::with_capacity(w * h);
    for row in pixels
        .chunks_exact(width as usize)
        .skip(roi.y as usize)
        .take(h)
    {
        data.extend(row[roi.x as usize..roi.x as usize + w].iter().map(|&p| p >> shift));
    }
    Ok(QuantizedImage {
        width: w,
        height: h,
        levels,
        data,
    })
}

pub fn quantize(frame: &Frame, levels: u32, roi: Option<Roi>) -> Result<QuantizedImage> {
    let px = frame.load()?;
    quantize_pixels(&px, frame.width, frame.height, levels, roi)
}

/// Raw co-occurrence counts, `levels × levels`, row-major by reference
/// gray level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlcmCounts {
    pub levels: usize,
    pub counts: Vec<u64>,
}

impl GlcmCounts {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn normalize(&self) -> Glcm {
        let total = self.total() as f64;
        Glcm {
            levels: self.levels,
            p: self.counts.iter().map(|&c| c as f64 / total).collect(),
        }
    }
}

/// Normalized co-occurrence matrix, `Σ p = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Glcm {
    pub levels: usize,
    pub p: Vec<f64>,
}

impl Glcm {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.p[i * self.levels + j]
    }
}

/// Counts pairs `(img[y][x], img[y+dy][x+dx])` over every in-bounds
/// position. In symmetric mode the transpose is added.
pub fn cooccurrence_counts(img: &QuantizedImage, offset: (i32, i32), symmetric: bool) -> Result<GlcmCounts> {
    let (dx, dy) = offset;
    let (w, h) = (img.width as i64, img.height as i64);
    let x0 = (-dx as i64).max(0);
    let x1 = (w - dx as i64).min(w);
    let y0 = (-dy as i64).max(0);
    let y1 = (h - dy as i64).min(h);
    if x0 >= x1 || y0 >= y1 {
        return Err(Error::EmptyCooccurrence { dx, dy });
    }

    let levels = img.levels as usize;
    let mut counts = vec![0u32; levels * levels];
    let span = (x1 - x0) as usize;
    for y in y0..y1 {
        let a = (y * w + x0) as usize;
        let b = ((y + dy as i64) * w + x0 + dx as i64) as usize;
        let ref_row = &img.data[a..a + span];
        let nbr_row = &img.data[b..b + span];
        for (&i, &j) in ref_row.iter().zip(nbr_row) {
            counts[i as usize * levels + j as usize] += 1;
        }
    }

    let mut out: Vec<u64> = counts.iter().map(|&c| c as u64).collect();
    if symmetric {
        for i in 0..levels {
            for j in 0..levels {
                out[i * levels + j] += counts[j * levels + i] as u64;
            }
        }
    }
    Ok(GlcmCounts {
        levels,
        counts: out,
    })
}

pub fn glcm(img: &QuantizedImage, offset: (i32, i32), symmetric: bool) -> Result<Glcm> {
    cooccurrence_counts(img, offset, symmetric).map(|c| c.normalize())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TextureFeatures {
    pub asm: f64,
    pub energy: f64,
    pub homogeneity: f64,
}

impl TextureFeatures {
    fn from_sums(asm: f64, homogeneity: f64) -> Self {
        Self {
            asm,
            energy: asm.sqrt(),
            homogeneity,
        }
    }

    /// Arithmetic mean of ASM and homogeneity over several matrices; energy
    /// is taken from the mean ASM so that `energy² = asm` still holds.
    pub fn mean(items: &[TextureFeatures]) -> Option<Self> {
        if items.is_empty() {
            return None;
        }
        let n = items.len() as f64;
        let asm = items.iter().map(|f| f.asm).sum::<f64>() / n;
        let hom = items.iter().map(|f| f.homogeneity).sum::<f64>() / n;
        Some(Self::from_sums(asm, hom))
    }
}

/// ASM, energy and homogeneity of a normalized, square co-occurrence
/// matrix.
pub fn texture_features(p: &Glcm) -> Result<TextureFeatures> {
    if p.p.len() != p.levels * p.levels {
        return Err(Error::Config("co-occurrence matrix is not square".into()));
    }
    let sum: f64 = p.p.iter().sum();
    if (sum - 1.0).abs() > 1e-6 {
        return Err(Error::Unnormalized(sum));
    }
    let mut asm = 0.0;
    let mut hom = 0.0;
    for i in 0..p.levels {
        let row = &p.p[i * p.levels..(i + 1) * p.levels];
        for (j, &v) in row.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            let d = i as f64 - j as f64;
            asm += v * v;
            hom += v / (1.0 + d * d);
        }
    }
    Ok(TextureFeatures::from_sums(asm, hom))
}
