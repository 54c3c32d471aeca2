//! Movement smoothness of a speed profile: log dimensionless jerk and
//! spectral arc length. Both are invariant to the amplitude of the profile
//! and read more negative for less smooth movement.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const LDLJ_MIN_LEN: usize = 3;
pub const SPARC_MIN_LEN: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SparcConfig {
    pub cutoff_hz: f64,
    pub amplitude_threshold: f64,
    /// Extra factor of two zero-padding beyond the next power of two.
    pub padding_level: u32,
}

impl Default for SparcConfig {
    fn default() -> Self {
        Self {
            cutoff_hz: 10.0,
            amplitude_threshold: 0.05,
            padding_level: 4,
        }
    }
}

fn peak(speed: &[f64]) -> Result<f64> {
    let peak = speed.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    if peak > 0.0 {
        Ok(peak)
    } else {
        Err(Error::NoMotion)
    }
}

/// `-ln(T³ / v_peak² · ∫ (dv/dt)² dt)` with central differences inside the
/// series and one-sided differences at its ends. `T` is the span of the
/// series, `(n − 1)·Δt`.
pub fn log_dimensionless_jerk(speed: &[f64], delta_t_s: f64) -> Result<f64> {
    if speed.len() < LDLJ_MIN_LEN {
        return Err(Error::SeriesTooShort {
            need: LDLJ_MIN_LEN,
            got: speed.len(),
        });
    }
    let v_peak = peak(speed)?;
    let n = speed.len();
    let dt = delta_t_s;
    let deriv = |i: usize| -> f64 {
        if i == 0 {
            (speed[1] - speed[0]) / dt
        } else if i == n - 1 {
            (speed[n - 1] - speed[n - 2]) / dt
        } else {
            (speed[i + 1] - speed[i - 1]) / (2.0 * dt)
        }
    };
    let integral: f64 = (0..n).map(|i| deriv(i).powi(2) * dt).sum();
    let duration = (n - 1) as f64 * dt;
    Ok(-(duration.powi(3) / (v_peak * v_peak) * integral).ln())
}

/// Magnitude spectrum `|V(f_k)|` for `f_k = k·fs/N`, `k = 0..=N/2`, with the
/// signal zero-padded to `N = 2^(⌈log2 n⌉ + padding_level)`.
pub fn magnitude_spectrum(speed: &[f64], padding_level: u32) -> Vec<f64> {
    let bits = (usize::BITS - (speed.len().max(1) - 1).leading_zeros()) + padding_level;
    let nfft = 1usize << bits;
    let mut buf: Vec<Complex<f64>> = speed.iter().map(|&v| Complex::new(v, 0.0)).collect();
    buf.resize(nfft, Complex::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(nfft).process(&mut buf);
    buf[..=nfft / 2].iter().map(|c| c.norm()).collect()
}

/// Negative arc length of the `V(0)`-normalized magnitude spectrum over
/// `[0, cutoff]`, trimmed to the last frequency whose normalized magnitude
/// reaches the amplitude threshold. The frequency axis is rescaled to unit
/// length over the retained band.
pub fn sparc(speed: &[f64], sample_rate_hz: f64, cfg: &SparcConfig) -> Result<f64> {
    if speed.len() < SPARC_MIN_LEN {
        return Err(Error::SeriesTooShort {
            need: SPARC_MIN_LEN,
            got: speed.len(),
        });
    }
    peak(speed)?;
    let mag = magnitude_spectrum(speed, cfg.padding_level);
    let nfft = (mag.len() - 1) * 2;
    let df = sample_rate_hz / nfft as f64;
    let v0 = mag[0];
    if !(v0 > 0.0) {
        return Err(Error::NoMotion);
    }
    let in_band = mag
        .iter()
        .take_while({
            let mut k = 0usize;
            move |_| {
                let f = k as f64 * df;
                k += 1;
                f <= cfg.cutoff_hz
            }
        })
        .count();
    let norm: Vec<f64> = mag[..in_band].iter().map(|m| m / v0).collect();
    let last = norm
        .iter()
        .rposition(|&m| m >= cfg.amplitude_threshold)
        .unwrap_or(0);
    if last == 0 {
        return Ok(0.0);
    }
    let step = 1.0 / last as f64;
    let arc: f64 = norm[..=last]
        .windows(2)
        .map(|w| (step * step + (w[1] - w[0]).powi(2)).sqrt())
        .sum();
    Ok(-arc)
}
