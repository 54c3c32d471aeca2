//! Fusion of ultrasound frame and probe-orientation streams, texture and
//! motion features, and scanning-skill reports.

pub mod error;
pub mod features;
pub mod fusion;
pub mod cli;
pub mod ingest;
pub mod output;
pub mod quat;
pub mod session;
pub mod skill;
pub mod synth;

pub use error::{Error, Result};
pub use quat::Quaternion;
pub use session::{Frame, PoseSample, Role, Session, SessionMeta, Timestamp};
