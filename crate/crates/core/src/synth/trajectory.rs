//! Orientation-only probe trajectories.
//!
//! Draw order from the trajectory stream (ChaCha8, stream 0, seeded with
//! the profile seed), which fixes the statistical behavior of a seed:
//!
//! 1. sample count `N`, uniform over the effective range
//! 2. idle lead-in duration, uniform (expert 0.3–0.6 s, novice 0.5–1.0 s)
//! 3. final hold at the target, uniform (expert 0.2–0.4 s, novice 0.3–0.6 s)
//! 4. novice only: segment count, uniform over `n_segments`
//! 5. novice only: per intermediate waypoint, axis (3 × uniform[-1,1]) then
//!    angle (uniform 0.3–1.2 rad)
//! 6. novice only: per segment a duration weight (uniform 0.5–1.5), then per
//!    pause a duration (uniform 0.3–1.2 s)
//! 7. tremor (when `tremor_amp_rad > 0`): axis weights (3 × uniform[-1,1]),
//!    three initial phases (uniform 0–2π), then phase-jitter knots every
//!    0.5 s, three per knot (uniform ±0.6 rad increments)
//!
//! The tremor fades out over the first half of the final hold, so every
//! session ends with at least 0.1 s of exact stillness at the target.

use std::f64::consts::TAU;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::fusion::slerp;
use crate::quat::Quaternion;
use crate::session::PoseSample;
use crate::synth::{ProfileConfig, ProfileKind};

/// Minimum-jerk time scaling `s(τ) = 6τ⁵ − 15τ⁴ + 10τ³`.
pub fn min_jerk(tau: f64) -> f64 {
    let t = tau.clamp(0.0, 1.0);
    (t * t * t * (10.0 + t * (-15.0 + 6.0 * t))).min(1.0)
}

#[derive(Debug, Clone)]
struct Slew {
    start_s: f64,
    end_s: f64,
    from: Quaternion,
    to: Quaternion,
}

#[derive(Debug, Clone)]
struct Tremor {
    amp: f64,
    freq_hz: f64,
    weights: [f64; 3],
    phases: [f64; 3],
    knot_step_s: f64,
    /// Envelope is 1 before `fade_start_s` and 0 after `fade_end_s`.
    fade_start_s: f64,
    fade_end_s: f64,
    /// Cumulative phase jitter per knot and axis.
    knots: Vec<[f64; 3]>,
}

impl Tremor {
    fn rotation_vector(&self, t: f64) -> [f64; 3] {
        if t >= self.fade_end_s {
            return [0.0; 3];
        }
        let envelope = 1.0 - min_jerk((t - self.fade_start_s) / (self.fade_end_s - self.fade_start_s));
        let pos = (t / self.knot_step_s).max(0.0);
        let i = (pos.floor() as usize).min(self.knots.len() - 2);
        let frac = (pos - i as f64).min(1.0);
        let mut r = [0.0; 3];
        for (c, out) in r.iter_mut().enumerate() {
            let jitter = self.knots[i][c] + frac * (self.knots[i + 1][c] - self.knots[i][c]);
            let phase = TAU * self.freq_hz * t + self.phases[c] + jitter;
            *out = envelope * self.amp * self.weights[c] * phase.sin();
        }
        r
    }
}

/// A continuous-time trajectory: piecewise minimum-jerk slews between
/// waypoints, idle elsewhere, with optional body-frame tremor on top.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub n_samples: usize,
    pub pose_rate_hz: f64,
    start: Quaternion,
    slews: Vec<Slew>,
    tremor: Option<Tremor>,
}

impl Trajectory {
    pub fn duration_s(&self) -> f64 {
        (self.n_samples - 1) as f64 / self.pose_rate_hz
    }

    fn base(&self, t: f64) -> Quaternion {
        let mut q = self.start;
        for s in &self.slews {
            if t < s.start_s {
                break;
            }
            if t >= s.end_s {
                q = s.to;
                continue;
            }
            let u = min_jerk((t - s.start_s) / (s.end_s - s.start_s));
            return slerp(&s.from, &s.to, u).expect("u in [0, 1]");
        }
        q
    }

    pub fn at(&self, t: f64) -> Quaternion {
        let base = self.base(t);
        let q = match &self.tremor {
            Some(tr) => base * Quaternion::from_rotation_vector(tr.rotation_vector(t)),
            None => base,
        };
        q.to_unit().expect("trajectory quaternions are unit")
    }

    /// Sampling instant of pose `k`, microseconds.
    pub fn pose_time_us(&self, k: usize) -> u64 {
        (k as f64 * 1e6 / self.pose_rate_hz).round() as u64
    }

    pub fn poses(&self) -> Vec<PoseSample> {
        (0..self.n_samples)
            .map(|k| {
                let t_us = self.pose_time_us(k);
                PoseSample::new(t_us, self.at(t_us as f64 * 1e-6))
            })
            .collect()
    }
}

fn random_axis(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-3 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

pub(crate) fn build(p: &ProfileConfig, rng: &mut ChaCha8Rng) -> Trajectory {
    let (lo, hi) = p.effective_sample_range();
    let n_samples = rng.gen_range(lo..=hi) as usize;
    let rate = p.pose_rate_hz;
    let duration = (n_samples - 1) as f64 / rate;

    let lead_in = match p.kind {
        ProfileKind::Expert => rng.gen_range(0.3..0.6),
        ProfileKind::Novice => rng.gen_range(0.5..1.0),
    };
    let hold = match p.kind {
        ProfileKind::Expert => rng.gen_range(0.2..0.4),
        ProfileKind::Novice => rng.gen_range(0.3..0.6),
    };
    let arrive = duration - hold;

    let mut slews = Vec::new();
    match p.kind {
        ProfileKind::Expert => {
            slews.push(Slew {
                start_s: lead_in,
                end_s: arrive,
                from: Quaternion::IDENTITY,
                to: p.target_orientation,
            });
        }
        ProfileKind::Novice => {
            let (smin, smax) = p.n_segments;
            let n_seg = rng.gen_range(smin..=smax).max(1) as usize;
            let mut waypoints = vec![Quaternion::IDENTITY];
            for _ in 1..n_seg {
                let axis = random_axis(rng);
                let angle = rng.gen_range(0.3..1.2);
                waypoints.push(Quaternion::from_axis_angle(axis, angle));
            }
            waypoints.push(p.target_orientation);

            let weights: Vec<f64> = (0..n_seg).map(|_| rng.gen_range(0.5..1.5)).collect();
            let pauses: Vec<f64> = (1..n_seg).map(|_| rng.gen_range(0.3..1.2)).collect();
            let moving = arrive - lead_in - pauses.iter().sum::<f64>();
            let wsum: f64 = weights.iter().sum();
            let mut t = lead_in;
            for i in 0..n_seg {
                let len = moving * weights[i] / wsum;
                let end = if i + 1 == n_seg { arrive } else { t + len };
                let (from, mut to) = (waypoints[i], waypoints[i + 1]);
                if from.dot(&to) < 0.0 {
                    to = -to;
                    waypoints[i + 1] = to;
                }
                slews.push(Slew {
                    start_s: t,
                    end_s: end,
                    from,
                    to,
                });
                t = end + pauses.get(i).copied().unwrap_or(0.0);
            }
        }
    }

    let tremor = (p.tremor_amp_rad > 0.0).then(|| {
        let weights = random_axis(rng);
        let phases = [rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU)];
        let knot_step_s = 0.5;
        let n_knots = (duration / knot_step_s).ceil() as usize + 2;
        let mut knots = Vec::with_capacity(n_knots);
        let mut acc = [0.0f64; 3];
        for _ in 0..n_knots {
            knots.push(acc);
            for a in acc.iter_mut() {
                *a += rng.gen_range(-0.6..0.6);
            }
        }
        Tremor {
            amp: p.tremor_amp_rad,
            freq_hz: p.tremor_hz,
            weights,
            phases,
            knot_step_s,
            fade_start_s: arrive,
            fade_end_s: arrive + 0.5 * hold,
            knots,
        }
    });

    Trajectory {
        n_samples,
        pose_rate_hz: rate,
        start: Quaternion::IDENTITY,
        slews,
        tremor,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_jerk_profile() {
        assert_eq!(min_jerk(0.0), 0.0);
        assert_eq!(min_jerk(1.0), 1.0);
        assert!((min_jerk(0.5) - 0.5).abs() < 1e-15);
        // ds/dτ = 30τ²(1−τ)², peak 15/8 at τ = 1/2
        let h = 1e-6;
        let d = (min_jerk(0.5 + h) - min_jerk(0.5 - h)) / (2.0 * h);
        assert!((d - 1.875).abs() < 1e-6);
    }
}
