//! Placement of the pose and frame streams on one uniform Δt grid.
//!
//! The grid origin is the first pose timestamp inside the overlap of the two
//! streams. Each grid instant gets an interpolated pose and, if one is close
//! enough in time, a frame.

mod interp;
mod stream;

use serde::{Deserialize, Serialize};

pub use interp::{hemisphere_align, slerp, SLERP_LINEAR_THRESHOLD};
pub use stream::StreamingFuser;

use crate::error::{Error, Result};
use crate::quat::Quaternion;
use crate::session::{PoseSample, Session, Timestamp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PosePolicy {
    #[default]
    Slerp,
    Nearest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FramePolicy {
    #[default]
    Nearest,
    LatestNotAfter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResampleConfig {
    pub delta_t_us: u64,
    pub pose_policy: PosePolicy,
    pub frame_policy: FramePolicy,
    pub max_frame_staleness_us: u64,
    /// Constant added to every frame timestamp before association.
    pub frame_offset_us: i64,
}

impl Default for ResampleConfig {
    fn default() -> Self {
        Self {
            delta_t_us: 10_000,
            pose_policy: PosePolicy::Slerp,
            frame_policy: FramePolicy::Nearest,
            max_frame_staleness_us: 100_000,
            frame_offset_us: 0,
        }
    }
}

impl ResampleConfig {
    /// Grid step equal to the nominal pose period.
    pub fn for_pose_rate(pose_rate_hz: f64) -> Self {
        let delta_t_us = (1e6 / pose_rate_hz).round().max(1.0) as u64;
        Self {
            delta_t_us,
            max_frame_staleness_us: delta_t_us.max(Self::default().max_frame_staleness_us),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.delta_t_us < 1 {
            return Err(Error::Config("delta_t_us must be >= 1".into()));
        }
        if self.max_frame_staleness_us < self.delta_t_us {
            return Err(Error::Config(
                "max_frame_staleness_us must be >= delta_t_us".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameMatch {
    pub idx: usize,
    pub staleness_us: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FusedSample {
    pub t: Timestamp,
    pub q: Quaternion,
    pub frame: Option<FrameMatch>,
}

/// Pose at `t` from the bracketing pair `a.t <= t <= b.t`.
pub(crate) fn interpolate_pose(a: &PoseSample, b: &PoseSample, t: u64, policy: PosePolicy) -> Quaternion {
    if t == a.t.0 {
        return a.q;
    }
    if t == b.t.0 {
        return b.q;
    }
    let (ta, tb) = (a.t.0, b.t.0);
    match policy {
        PosePolicy::Slerp => {
            let u = (t - ta) as f64 / (tb - ta) as f64;
            interp::slerp_unchecked(&a.q, &b.q, u)
        }
        PosePolicy::Nearest => {
            if t - ta <= tb - t {
                a.q
            } else {
                b.q
            }
        }
    }
}

/// Chooses a frame for grid instant `t` given the latest frame at or before
/// `t` and the earliest frame after it. Ties go to the earlier frame.
pub(crate) fn associate_frame(
    t: i64,
    before: Option<(usize, i64)>,
    after: Option<(usize, i64)>,
    cfg: &ResampleConfig,
) -> Option<FrameMatch> {
    let pick = match cfg.frame_policy {
        FramePolicy::LatestNotAfter => before,
        FramePolicy::Nearest => match (before, after) {
            (Some(b), Some(a)) => {
                if t - b.1 <= a.1 - t {
                    Some(b)
                } else {
                    Some(a)
                }
            }
            (b, a) => b.or(a),
        },
    }?;
    let staleness_us = pick.1.abs_diff(t);
    (staleness_us <= cfg.max_frame_staleness_us).then_some(FrameMatch {
        idx: pick.0,
        staleness_us,
    })
}

fn check_increasing(poses: &[PoseSample]) -> Result<()> {
    for (i, w) in poses.windows(2).enumerate() {
        if w[1].t <= w[0].t {
            return Err(Error::TimestampRegression { line: i + 2 });
        }
    }
    Ok(())
}

/// Interpolates poses at `origin, origin + Δt, …` up to `end` inclusive.
/// `poses` must bracket the whole range.
fn poses_on_grid(poses: &[PoseSample], origin: u64, end: u64, cfg: &ResampleConfig) -> Vec<PoseSample> {
    let dt = cfg.delta_t_us;
    let n = ((end - origin) / dt + 1) as usize;
    let mut out = Vec::with_capacity(n);
    let mut i = 0usize;
    for k in 0..n as u64 {
        let t = origin + k * dt;
        while i + 2 < poses.len() && poses[i + 1].t.0 <= t {
            i += 1;
        }
        out.push(PoseSample {
            t: Timestamp(t),
            q: interpolate_pose(&poses[i], &poses[i + 1], t, cfg.pose_policy),
        });
    }
    out
}

/// Resamples a hemisphere-aligned pose stream onto the grid anchored at its
/// first timestamp. No extrapolation past the last input.
pub fn resample_poses(poses: &[PoseSample], cfg: &ResampleConfig) -> Result<Vec<PoseSample>> {
    cfg.validate()?;
    if poses.len() < 2 {
        return Err(Error::CannotInterpolate(poses.len()));
    }
    check_increasing(poses)?;
    let origin = poses[0].t.0;
    let end = poses[poses.len() - 1].t.0;
    Ok(poses_on_grid(poses, origin, end, cfg))
}

/// Fuses both streams of `session` over their common time span.
pub fn fuse_streams(session: &Session, cfg: &ResampleConfig) -> Result<Vec<FusedSample>> {
    cfg.validate()?;
    let poses = hemisphere_align(&session.poses);
    if poses.len() < 2 {
        return Err(Error::CannotInterpolate(poses.len()));
    }
    check_increasing(&poses)?;
    let frame_times: Vec<i64> = session
        .frames
        .iter()
        .map(|f| f.t.0 as i64 + cfg.frame_offset_us)
        .collect();
    if let Some(i) = frame_times.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::TimestampRegression { line: i + 3 });
    }
    let (Some(&f0), Some(&f1)) = (frame_times.first(), frame_times.last()) else {
        return Err(Error::NoOverlap);
    };

    let p0 = poses[0].t.0 as i64;
    let p1 = poses[poses.len() - 1].t.0 as i64;
    let start = p0.max(f0);
    let end = p1.min(f1);
    if start > end {
        return Err(Error::NoOverlap);
    }
    let first_inside = poses.partition_point(|p| (p.t.0 as i64) < start);
    let origin = poses[first_inside].t.0;
    if origin as i64 > end {
        return Err(Error::NoOverlap);
    }
    let grid = poses_on_grid(&poses, origin, end as u64, cfg);

    let mut out = Vec::with_capacity(grid.len());
    let mut j = 0usize; // first frame strictly after t
    for g in grid {
        let t = g.t.0 as i64;
        while j < frame_times.len() && frame_times[j] <= t {
            j += 1;
        }
        let before = j.checked_sub(1).map(|i| (i, frame_times[i]));
        let after = frame_times.get(j).map(|&ft| (j, ft));
        out.push(FusedSample {
            t: g.t,
            q: g.q,
            frame: associate_frame(t, before, after, cfg),
        });
    }
    Ok(out)
}
