//! Procedural stand-in for phantom images: a fixed smooth noise field whose
//! contrast grows as the probe approaches the target orientation.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::quat::Quaternion;
use crate::session::{Frame, PixelSource, Pixels, Timestamp};

/// Alignment width σ in `a = exp(−(θ/σ)²)`, radians.
pub const ALIGNMENT_SIGMA_RAD: f64 = 0.2;
pub const MIN_CONTRAST: f64 = 16.0;
pub const CONTRAST_GAIN: f64 = 96.0;

const COARSE_CELL: usize = 16;
const FINE_CELL: usize = 4;
const FINE_WEIGHT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Geometry {
    pub width: u32,
    pub height: u32,
}

impl Default for Geometry {
    fn default() -> Self {
        Self {
            width: 640,
            height: 480,
        }
    }
}

pub fn contrast_for(q: &Quaternion, target: &Quaternion) -> f64 {
    let theta = q.geodesic_angle(target);
    let a = (-(theta / ALIGNMENT_SIGMA_RAD).powi(2)).exp();
    MIN_CONTRAST + CONTRAST_GAIN * a
}

/// Seeded value noise on a lattice with `cell`-pixel spacing, smoothstep
/// interpolated, values in `[-1, 1]`.
fn value_noise(rng: &mut ChaCha8Rng, width: usize, height: usize, cell: usize) -> Vec<f64> {
    let gw = width / cell + 2;
    let gh = height / cell + 2;
    let lattice: Vec<f64> = (0..gw * gh).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let smooth = |t: f64| t * t * (3.0 - 2.0 * t);
    let mut out = Vec::with_capacity(width * height);
    for y in 0..height {
        let (gy, fy) = (y / cell, smooth((y % cell) as f64 / cell as f64));
        for x in 0..width {
            let (gx, fx) = (x / cell, smooth((x % cell) as f64 / cell as f64));
            let v00 = lattice[gy * gw + gx];
            let v10 = lattice[gy * gw + gx + 1];
            let v01 = lattice[(gy + 1) * gw + gx];
            let v11 = lattice[(gy + 1) * gw + gx + 1];
            let top = v00 + fx * (v10 - v00);
            let bottom = v01 + fx * (v11 - v01);
            out.push(top + fy * (bottom - top));
        }
    }
    out
}

/// Renders phantom frames for one seed and geometry. The noise field is
/// built once and shared by every frame.
#[derive(Debug)]
pub struct PhantomRenderer {
    pub geometry: Geometry,
    pub target: Quaternion,
    field: Vec<f64>,
}

impl PhantomRenderer {
    pub fn new(geometry: Geometry, target: Quaternion, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(1);
        let (w, h) = (geometry.width as usize, geometry.height as usize);
        let coarse = value_noise(&mut rng, w, h, COARSE_CELL);
        let fine = value_noise(&mut rng, w, h, FINE_CELL);
        let field = coarse
            .iter()
            .zip(&fine)
            .map(|(c, f)| (c + FINE_WEIGHT * f) / (1.0 + FINE_WEIGHT))
            .collect();
        Self {
            geometry,
            target,
            field,
        }
    }

    /// `128 + round(contrast · field(x, y))`.
    pub fn render(&self, q: &Quaternion) -> Vec<u8> {
        let contrast = contrast_for(q, &self.target);
        self.field
            .iter()
            .map(|&b| (128.0 + (contrast * b).round()).clamp(0.0, 255.0) as u8)
            .collect()
    }
}

/// Deferred pixels of one phantom frame.
#[derive(Debug)]
pub struct PhantomFrame {
    pub renderer: Arc<PhantomRenderer>,
    pub q: Quaternion,
}

impl PixelSource for PhantomFrame {
    fn load(&self) -> Result<Arc<[u8]>> {
        Ok(self.renderer.render(&self.q).into())
    }
}

pub fn phantom_frame(renderer: &Arc<PhantomRenderer>, t_us: u64, q: Quaternion) -> Frame {
    Frame {
        t: Timestamp(t_us),
        width: renderer.geometry.width,
        height: renderer.geometry.height,
        pixels: Pixels::Deferred(Arc::new(PhantomFrame {
            renderer: renderer.clone(),
            q,
        })),
    }
}

/// One resident phantom frame at time zero.
pub fn gen_phantom_frame(q: &Quaternion, target: &Quaternion, geometry: Geometry, seed: u64) -> Frame {
    let renderer = PhantomRenderer::new(geometry, *target, seed);
    Frame {
        t: Timestamp(0),
        width: geometry.width,
        height: geometry.height,
        pixels: Pixels::Loaded(renderer.render(q).into()),
    }
}
