//! Time, session identity and the in-memory session model.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quat::Quaternion;

/// Microseconds since session start on a monotonic clock.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Timestamp(pub u64);

impl Timestamp {
    pub fn micros(self) -> u64 {
        self.0
    }

    pub fn as_secs_f64(self) -> f64 {
        self.0 as f64 * 1e-6
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Expert,
    Novice,
    Unknown,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Expert => "expert",
            Role::Novice => "novice",
            Role::Unknown => "unknown",
        }
    }
}

impl FromStr for Role {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "expert" => Ok(Role::Expert),
            "novice" => Ok(Role::Novice),
            "unknown" => Ok(Role::Unknown),
            other => Err(Error::UnknownRole(other.to_string())),
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionMeta {
    pub session_id: String,
    pub participant_role: Role,
    pub trial: u32,
    pub pose_rate_hz: f64,
    pub frame_rate_hz: f64,
}

impl SessionMeta {
    pub fn validate(&self) -> Result<()> {
        if !(self.pose_rate_hz > 0.0 && self.frame_rate_hz > 0.0)
            || !self.pose_rate_hz.is_finite()
            || !self.frame_rate_hz.is_finite()
        {
            return Err(Error::NonPositiveRate);
        }
        if self.trial < 1 {
            return Err(Error::Manifest("trial must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoseSample {
    pub t: Timestamp,
    pub q: Quaternion,
}

impl PoseSample {
    pub fn new(t_us: u64, q: Quaternion) -> Self {
        Self {
            t: Timestamp(t_us),
            q,
        }
    }
}

/// Something that can produce the pixels of one frame on demand.
///
/// Loads must be idempotent: repeated or concurrent calls return identical
/// bytes.
pub trait PixelSource: Send + Sync + fmt::Debug {
    fn load(&self) -> Result<Arc<[u8]>>;
}

/// Frame pixels, either resident or fetched on each access.
#[derive(Debug, Clone)]
pub enum Pixels {
    Loaded(Arc<[u8]>),
    Deferred(Arc<dyn PixelSource>),
}

/// One 8-bit grayscale frame, row-major.
#[derive(Debug, Clone)]
pub struct Frame {
    pub t: Timestamp,
    pub width: u32,
    pub height: u32,
    pub pixels: Pixels,
}

impl Frame {
    pub fn from_pixels(t_us: u64, width: u32, height: u32, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 || pixels.len() != width as usize * height as usize {
            return Err(Error::Config(format!(
                "frame {width}x{height} does not match {} pixels",
                pixels.len()
            )));
        }
        Ok(Self {
            t: Timestamp(t_us),
            width,
            height,
            pixels: Pixels::Loaded(pixels.into()),
        })
    }

    pub fn load(&self) -> Result<Arc<[u8]>> {
        let px = match &self.pixels {
            Pixels::Loaded(px) => px.clone(),
            Pixels::Deferred(src) => src.load()?,
        };
        if px.len() != self.width as usize * self.height as usize {
            return Err(Error::Config(format!(
                "frame at {} us has {} pixels, expected {}x{}",
                self.t,
                px.len(),
                self.width,
                self.height
            )));
        }
        Ok(px)
    }

    /// Copy of this frame with resident pixels.
    pub fn materialize(&self) -> Result<Frame> {
        Ok(Frame {
            pixels: Pixels::Loaded(self.load()?),
            ..self.clone()
        })
    }
}

/// A non-persisted finding recorded while reading a session from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct NormOutlier {
    pub line: usize,
    pub t: Timestamp,
    pub norm: f64,
}

#[derive(Debug, Clone)]
pub struct Session {
    pub meta: SessionMeta,
    pub poses: Vec<PoseSample>,
    pub frames: Vec<Frame>,
    /// Raw quaternions whose norm deviated from 1 by more than the
    /// re-normalization tolerance when read from disk.
    pub norm_outliers: Vec<NormOutlier>,
    /// Directory the session was read from or written to, if any.
    pub root: Option<PathBuf>,
}

impl Session {
    pub fn new(meta: SessionMeta, poses: Vec<PoseSample>, frames: Vec<Frame>) -> Self {
        Self {
            meta,
            poses,
            frames,
            norm_outliers: Vec::new(),
            root: None,
        }
    }
}
