//! Deterministic synthetic sessions: expert-like and novice-like probe
//! trajectories with matching phantom image sequences.
//!
//! Expert sessions are a single minimum-jerk slew from the identity to the
//! target orientation after a short idle lead-in. Novice sessions wander
//! through random waypoints with pauses in between and carry a 4 Hz tremor.
//! Both end holding still at the target.
//! Both are calibrated so that a session spans the sample counts given in
//! `n_samples_range` on the default 10 ms grid.

pub mod phantom;
pub mod trajectory;

use std::path::Path;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use phantom::{gen_phantom_frame, Geometry, PhantomRenderer};
pub use trajectory::{min_jerk, Trajectory};

use crate::error::{Error, Result};
use crate::ingest::write_session;
use crate::quat::Quaternion;
use crate::session::{Frame, PoseSample, Role, Session, SessionMeta, Timestamp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    Expert,
    Novice,
}

impl ProfileKind {
    pub fn role(self) -> Role {
        match self {
            ProfileKind::Expert => Role::Expert,
            ProfileKind::Novice => Role::Novice,
        }
    }
}

impl std::str::FromStr for ProfileKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "expert" => Ok(ProfileKind::Expert),
            "novice" => Ok(ProfileKind::Novice),
            other => Err(Error::Config(format!(
                "unknown profile `{other}`; expected expert|novice"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub kind: ProfileKind,
    pub seed: u64,
    pub pose_rate_hz: f64,
    pub frame_rate_hz: f64,
    /// Inclusive range of pose-sample counts.
    pub n_samples_range: (u32, u32),
    pub tremor_amp_rad: f64,
    pub tremor_hz: f64,
    /// Inclusive range of slew-segment counts.
    pub n_segments: (u32, u32),
    pub target_orientation: Quaternion,
    pub geometry: Geometry,
}

/// Target of every synthetic session: 50° about (0.3, 1, 0.2).
pub fn default_target() -> Quaternion {
    Quaternion::from_axis_angle([0.3, 1.0, 0.2], 50f64.to_radians())
}

impl ProfileConfig {
    pub fn expert(seed: u64) -> Self {
        Self {
            kind: ProfileKind::Expert,
            seed,
            pose_rate_hz: 100.0,
            frame_rate_hz: 25.0,
            n_samples_range: (1600, 2500),
            tremor_amp_rad: 0.0,
            tremor_hz: 4.0,
            n_segments: (1, 1),
            target_orientation: default_target(),
            geometry: Geometry::default(),
        }
    }

    pub fn novice(seed: u64) -> Self {
        Self {
            kind: ProfileKind::Novice,
            n_samples_range: (5000, 10000),
            tremor_amp_rad: 0.03,
            n_segments: (6, 12),
            ..Self::expert(seed)
        }
    }

    pub fn for_kind(kind: ProfileKind, seed: u64) -> Self {
        match kind {
            ProfileKind::Expert => Self::expert(seed),
            ProfileKind::Novice => Self::novice(seed),
        }
    }

    pub fn with_geometry(mut self, width: u32, height: u32) -> Self {
        self.geometry = Geometry { width, height };
        self
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.n_samples_range;
        if lo < 2 || lo > hi {
            return Err(Error::Config("n_samples_range must be non-empty with lower bound >= 2".into()));
        }
        if !(self.pose_rate_hz > 0.0 && self.frame_rate_hz > 0.0) {
            return Err(Error::NonPositiveRate);
        }
        if !(self.tremor_amp_rad >= 0.0) || !(self.tremor_hz >= 0.0) {
            return Err(Error::Config("tremor parameters must be non-negative".into()));
        }
        let (smin, smax) = self.n_segments;
        if smin < 1 || smin > smax {
            return Err(Error::Config("n_segments must be a non-empty range >= 1".into()));
        }
        if self.geometry.width == 0 || self.geometry.height == 0 {
            return Err(Error::Config("frame geometry must be non-zero".into()));
        }
        self.target_orientation.normalize()?;
        Ok(())
    }

    /// Range `N` is drawn from. The fused grid ends at the last frame, up
    /// to one frame period before the last pose, so the lower bound is
    /// raised by that many pose samples.
    pub fn effective_sample_range(&self) -> (u32, u32) {
        let (lo, hi) = self.n_samples_range;
        let slack = (self.pose_rate_hz / self.frame_rate_hz).ceil().max(1.0) as u32;
        ((lo + slack).min(hi), hi)
    }

    fn target(&self) -> Quaternion {
        self.target_orientation
            .to_unit()
            .expect("validated target orientation")
    }
}

pub fn build_trajectory(p: &ProfileConfig) -> Result<Trajectory> {
    p.validate()?;
    let p = ProfileConfig {
        target_orientation: p.target(),
        ..p.clone()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    Ok(trajectory::build(&p, &mut rng))
}

pub fn gen_trajectory(p: &ProfileConfig) -> Result<Vec<PoseSample>> {
    Ok(build_trajectory(p)?.poses())
}

fn session_meta(p: &ProfileConfig) -> SessionMeta {
    SessionMeta {
        session_id: format!("synthetic-{}-seed{}", p.kind.role(), p.seed),
        participant_role: p.kind.role(),
        trial: 1,
        pose_rate_hz: p.pose_rate_hz,
        frame_rate_hz: p.frame_rate_hz,
    }
}

/// Builds a session in memory. Frame pixels are rendered on access.
pub fn generate_session(p: &ProfileConfig) -> Result<Session> {
    let traj = build_trajectory(p)?;
    let poses = traj.poses();
    let last_t = poses.last().map(|s| s.t.0).unwrap_or(0);
    let renderer = Arc::new(PhantomRenderer::new(p.geometry, p.target(), p.seed));
    let frame_period_us = 1e6 / p.frame_rate_hz;
    let frames: Vec<Frame> = (0u64..)
        .map(|k| (k as f64 * frame_period_us).round() as u64)
        .take_while(|&t| t <= last_t)
        .map(|t| phantom::phantom_frame(&renderer, t, traj.at(t as f64 * 1e-6)))
        .collect();
    Ok(Session::new(session_meta(p), poses, frames))
}

/// Generates a session and writes it to `out_dir` in the standard layout,
/// echoing the profile into the manifest.
pub fn gen_session(p: &ProfileConfig, out_dir: &Path) -> Result<Session> {
    let mut session = generate_session(p)?;
    let profile = serde_json::to_value(p).expect("profile serializes");
    write_session(&session, out_dir, Some(&profile))?;
    session.root = Some(out_dir.to_path_buf());
    Ok(session)
}

/// Appends `duration_s` of stillness: the last pose repeated at the pose
/// rate and the last frame repeated at the frame rate.
pub fn with_idle_tail(session: &Session, duration_s: f64) -> Session {
    let mut out = session.clone();
    let tail_us = (duration_s * 1e6).round() as u64;
    if let Some(last) = session.poses.last().copied() {
        let period = 1e6 / session.meta.pose_rate_hz;
        let mut k = 1u64;
        loop {
            let dt = (k as f64 * period).round() as u64;
            if dt > tail_us {
                break;
            }
            out.poses.push(PoseSample {
                t: Timestamp(last.t.0 + dt),
                q: last.q,
            });
            k += 1;
        }
    }
    if let Some(last) = session.frames.last().cloned() {
        let period = 1e6 / session.meta.frame_rate_hz;
        let mut k = 1u64;
        loop {
            let dt = (k as f64 * period).round() as u64;
            if dt > tail_us {
                break;
            }
            out.frames.push(Frame {
                t: Timestamp(last.t.0 + dt),
                ..last.clone()
            });
            k += 1;
        }
    }
    out
}
