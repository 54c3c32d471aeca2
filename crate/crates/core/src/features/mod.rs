//! Per-frame texture features and per-trajectory motion quantities.

pub mod glcm;
pub mod histogram;
pub mod motion;
pub mod smoothness;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use glcm::{
    cooccurrence_counts, glcm, quantize, quantize_pixels, texture_features, Glcm, GlcmConfig, GlcmCounts,
    QuantizedImage, Roi, TextureFeatures, ALLOWED_LEVELS, DEFAULT_OFFSETS,
};
pub use histogram::{histogram_stats, HistogramStats};
pub use motion::{angular_velocity, moving_average, path_length, MotionSeries, Oriented};
pub use smoothness::{log_dimensionless_jerk, sparc, SparcConfig};

use crate::error::Result;
use crate::fusion::FusedSample;
use crate::session::{Frame, Session, Timestamp};

#[derive(Debug, Clone, PartialEq)]
pub struct FrameFeatures {
    pub texture: TextureFeatures,
    pub histogram: HistogramStats,
}

/// Texture features averaged over `cfg.offsets`, plus intensity statistics
/// of the same region.
pub fn frame_features(frame: &Frame, cfg: &GlcmConfig) -> Result<FrameFeatures> {
    cfg.validate_for(frame.width, frame.height)?;
    let px = frame.load()?;
    features_of_pixels(&px, frame.width, frame.height, cfg)
}

pub fn features_of_pixels(px: &[u8], width: u32, height: u32, cfg: &GlcmConfig) -> Result<FrameFeatures> {
    cfg.validate_for(width, height)?;
    let img = quantize_pixels(px, width, height, cfg.levels, cfg.roi)?;
    let per_offset = cfg
        .offsets
        .iter()
        .map(|&off| texture_features(&glcm(&img, off, cfg.symmetric)?))
        .collect::<Result<Vec<_>>>()?;
    let texture = TextureFeatures::mean(&per_offset).expect("offsets validated non-empty");

    let roi = cfg.roi.unwrap_or(Roi {
        x: 0,
        y: 0,
        w: width,
        h: height,
    });
    let rows = px
        .chunks_exact(width as usize)
        .skip(roi.y as usize)
        .take(roi.h as usize)
        .map(|r| &r[roi.x as usize..(roi.x + roi.w) as usize]);
    Ok(FrameFeatures {
        texture,
        histogram: histogram_stats(rows),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MotionConfig {
    /// Moving-average window, in grid steps, applied to angular speed
    /// before the smoothness metrics. 1 disables smoothing.
    pub smoothing_window: usize,
    pub sparc: SparcConfig,
}

impl Default for MotionConfig {
    fn default() -> Self {
        Self {
            smoothing_window: 5,
            sparc: SparcConfig::default(),
        }
    }
}

/// One row of `features.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub t: Timestamp,
    pub frame: Option<usize>,
    /// `None` on the first grid row.
    pub omega: Option<[f64; 3]>,
    pub speed: Option<f64>,
}

/// Features of a fused session: per-frame features for every frame used on
/// the grid, and motion per grid step.
#[derive(Debug, Clone)]
pub struct FeatureTable {
    pub frames: BTreeMap<usize, FrameFeatures>,
    pub motion: MotionSeries,
    pub rows: Vec<FeatureRow>,
}

impl FeatureTable {
    pub fn frame_features(&self, row: &FeatureRow) -> Option<&FrameFeatures> {
        row.frame.and_then(|i| self.frames.get(&i))
    }
}

/// Computes frame features for every frame referenced by `fused` (in
/// parallel; each frame is loaded once) and the motion series of the grid.
pub fn extract_features(
    session: &Session,
    fused: &[FusedSample],
    delta_t_us: u64,
    cfg: &GlcmConfig,
) -> Result<FeatureTable> {
    let mut used: Vec<usize> = fused.iter().filter_map(|f| f.frame.map(|m| m.idx)).collect();
    used.dedup();
    used.sort_unstable();
    used.dedup();
    if let Some(first) = used.first() {
        let f = &session.frames[*first];
        cfg.validate_for(f.width, f.height)?;
    }
    let computed = used
        .par_iter()
        .map(|&i| frame_features(&session.frames[i], cfg).map(|ff| (i, ff)))
        .collect::<Result<Vec<_>>>()?;
    let frames: BTreeMap<usize, FrameFeatures> = computed.into_iter().collect();

    let motion = if fused.len() >= 2 {
        angular_velocity(fused, delta_t_us)?
    } else {
        MotionSeries::default()
    };
    let rows = fused
        .iter()
        .enumerate()
        .map(|(k, f)| FeatureRow {
            t: f.t,
            frame: f.frame.map(|m| m.idx),
            omega: k.checked_sub(1).map(|j| motion.omega[j]),
            speed: k.checked_sub(1).map(|j| motion.speed[j]),
        })
        .collect();
    Ok(FeatureTable { frames, motion, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn frame(w: u32, h: u32, px: Vec<u8>) -> Frame {
        Frame::from_pixels(0, w, h, px).unwrap()
    }

    #[test]
    fn constant_frame() {
        let f = frame_features(&frame(64, 48, vec![77; 64 * 48]), &GlcmConfig::default()).unwrap();
        assert_eq!(f.texture.asm, 1.0);
        assert_eq!(f.texture.energy, 1.0);
        assert_eq!(f.texture.homogeneity, 1.0);
        assert_eq!(f.histogram.entropy, 0.0);
        assert_eq!(f.histogram.variance, 0.0);
    }

    #[test]
    fn mirrored_frame_mirrored_offsets() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let px: Vec<u8> = (0..256).map(|_| rng.gen()).collect();
            let mirrored: Vec<u8> = px
                .chunks(16)
                .flat_map(|row| row.iter().rev().copied().collect::<Vec<_>>())
                .collect();
            let cfg = GlcmConfig {
                levels: 8,
                symmetric: rng.gen(),
                ..Default::default()
            };
            let mcfg = GlcmConfig {
                offsets: cfg.offsets.iter().map(|&(dx, dy)| (-dx, dy)).collect(),
                ..cfg.clone()
            };
            let a = frame_features(&frame(16, 16, px), &cfg).unwrap();
            let b = frame_features(&frame(16, 16, mirrored), &mcfg).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn smoothing_raises_homogeneity() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (w, h) = (64usize, 64usize);
        let noise: Vec<u8> = (0..w * h).map(|_| rng.gen()).collect();
        let mut smooth = vec![0u8; w * h];
        for y in 0..h {
            for x in 0..w {
                let mut acc = 0u32;
                let mut n = 0u32;
                for yy in y.saturating_sub(2)..(y + 3).min(h) {
                    for xx in x.saturating_sub(2)..(x + 3).min(w) {
                        acc += noise[yy * w + xx] as u32;
                        n += 1;
                    }
                }
                smooth[y * w + x] = (acc / n) as u8;
            }
        }
        let cfg = GlcmConfig::default();
        let a = frame_features(&frame(w as u32, h as u32, noise), &cfg).unwrap();
        let b = frame_features(&frame(w as u32, h as u32, smooth), &cfg).unwrap();
        assert!(b.texture.homogeneity > a.texture.homogeneity);
    }

    #[test]
    fn roi_restricts_histogram() {
        let mut px = vec![0u8; 16];
        px[5] = 200;
        px[6] = 200;
        px[9] = 200;
        px[10] = 200;
        let cfg = GlcmConfig {
            roi: Some(Roi { x: 1, y: 1, w: 2, h: 2 }),
            ..Default::default()
        };
        let f = frame_features(&frame(4, 4, px), &cfg).unwrap();
        assert_eq!(f.histogram.mean, 200.0);
        assert_eq!(f.texture.asm, 1.0);
    }
}
