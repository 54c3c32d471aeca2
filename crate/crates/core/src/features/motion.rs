//! Kinematics of an orientation series on a uniform grid.

use crate::error::{Error, Result};
use crate::fusion::FusedSample;
use crate::quat::Quaternion;
use crate::session::{PoseSample, Timestamp};

/// Anything carrying a timestamped orientation.
pub trait Oriented {
    fn time(&self) -> Timestamp;
    fn orientation(&self) -> Quaternion;
}

impl Oriented for FusedSample {
    fn time(&self) -> Timestamp {
        self.t
    }
    fn orientation(&self) -> Quaternion {
        self.q
    }
}

impl Oriented for PoseSample {
    fn time(&self) -> Timestamp {
        self.t
    }
    fn orientation(&self) -> Quaternion {
        self.q
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MotionSeries {
    /// Timestamp of the later sample of each step.
    pub t: Vec<Timestamp>,
    /// Body-frame angular velocity, rad/s.
    pub omega: Vec<[f64; 3]>,
    /// `|omega|`, rad/s.
    pub speed: Vec<f64>,
}

/// Body-frame angular velocity between consecutive grid samples:
/// `ω_k = 2·log(q_k⁻¹ ⊗ q_{k+1}) / Δt`.
pub fn angular_velocity<S: Oriented>(samples: &[S], delta_t_us: u64) -> Result<MotionSeries> {
    if samples.len() < 2 {
        return Err(Error::SeriesTooShort {
            need: 2,
            got: samples.len(),
        });
    }
    if delta_t_us == 0 {
        return Err(Error::Config("delta_t_us must be >= 1".into()));
    }
    let dt = delta_t_us as f64 * 1e-6;
    let n = samples.len() - 1;
    let mut out = MotionSeries {
        t: Vec::with_capacity(n),
        omega: Vec::with_capacity(n),
        speed: Vec::with_capacity(n),
    };
    for (k, w) in samples.windows(2).enumerate() {
        let (t0, t1) = (w[0].time().0, w[1].time().0);
        if t1.checked_sub(t0) != Some(delta_t_us) {
            return Err(Error::NonUniformGrid(k + 1));
        }
        let rel = w[0].orientation().between(&w[1].orientation());
        let v = rel.log_vec();
        let omega = [2.0 * v[0] / dt, 2.0 * v[1] / dt, 2.0 * v[2] / dt];
        out.t.push(Timestamp(t1));
        out.speed
            .push((omega[0] * omega[0] + omega[1] * omega[1] + omega[2] * omega[2]).sqrt());
        out.omega.push(omega);
    }
    Ok(out)
}

/// Sum of geodesic angles between consecutive orientations, radians.
pub fn path_length<S: Oriented>(samples: &[S]) -> f64 {
    samples
        .windows(2)
        .map(|w| w[0].orientation().geodesic_angle(&w[1].orientation()))
        .sum()
}

/// Centered moving average; windows are truncated at the ends.
pub fn moving_average(x: &[f64], window: usize) -> Vec<f64> {
    if window <= 1 || x.is_empty() {
        return x.to_vec();
    }
    let before = (window - 1) / 2;
    let after = window - 1 - before;
    (0..x.len())
        .map(|i| {
            let lo = i.saturating_sub(before);
            let hi = (i + after + 1).min(x.len());
            x[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect()
}
