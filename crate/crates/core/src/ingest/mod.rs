//! Recorded sessions on disk.
//!
//! Layout of a session directory:
//!
//! ```text
//! manifest.json        session identity and nominal rates
//! pose.csv             t_us,w,x,y,z (Hamilton, scalar first)
//! frames/index.csv     t_us,file
//! frames/NNNNNN.pgm    8-bit binary PGM, one per frame
//! ```

pub mod frames;
pub mod manifest;
pub mod pgm;
pub mod pose_csv;
pub mod validate;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

pub use frames::{read_frame_index, FRAMES_DIR};
pub use manifest::{read_manifest, write_manifest, Manifest};
pub use pose_csv::{read_pose_csv, read_pose_csv_detailed, read_pose_csv_ordered};
pub use validate::{validate_session, Finding, Stream, ValidationReport};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quat::Quaternion;
use crate::session::Session;

pub const POSE_FILE: &str = "pose.csv";

/// Component order of quaternions in an IMU export.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuaternionOrder {
    /// `w,x,y,z`, the layout of `pose.csv`.
    #[default]
    ScalarFirst,
    /// `x,y,z,w`.
    ScalarLast,
}

impl QuaternionOrder {
    pub fn to_hamilton(self, c: [f64; 4]) -> Quaternion {
        match self {
            QuaternionOrder::ScalarFirst => Quaternion::new(c[0], c[1], c[2], c[3]),
            QuaternionOrder::ScalarLast => Quaternion::new(c[3], c[0], c[1], c[2]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IngestConfig {
    /// Layout of `pose.csv`. Sessions are always written scalar-first.
    pub quaternion_order: QuaternionOrder,
}

/// Loads a session directory. Frame pixels stay on disk until requested.
pub fn read_session(dir: &Path) -> Result<Session> {
    read_session_with(dir, &IngestConfig::default())
}

pub fn read_session_with(dir: &Path, cfg: &IngestConfig) -> Result<Session> {
    if !dir.is_dir() {
        return Err(Error::io(
            dir,
            std::io::Error::new(std::io::ErrorKind::NotFound, "session directory not found"),
        ));
    }
    let manifest = read_manifest(dir)?;
    let pose_path = dir.join(POSE_FILE);
    let file = File::open(&pose_path).map_err(|e| Error::io(&pose_path, e))?;
    let pose = pose_csv::read_pose_csv_ordered(file, cfg.quaternion_order)?;
    let frames = read_frame_index(dir)?;
    Ok(Session {
        meta: manifest.meta,
        poses: pose.samples,
        frames,
        norm_outliers: pose.norm_outliers,
        root: Some(dir.to_path_buf()),
    })
}

/// Writes a session in the directory layout above, creating `dir` if
/// needed. Frames are loaded and written one at a time.
pub fn write_session(
    session: &Session,
    dir: &Path,
    synthetic_profile: Option<&serde_json::Value>,
) -> Result<()> {
    let frames_dir = dir.join(FRAMES_DIR);
    std::fs::create_dir_all(&frames_dir).map_err(|e| Error::io(&frames_dir, e))?;
    write_manifest(dir, &session.meta, synthetic_profile)?;

    let pose_path = dir.join(POSE_FILE);
    std::fs::write(&pose_path, pose_csv::format_pose_csv(&session.poses))
        .map_err(|e| Error::io(&pose_path, e))?;

    for (i, frame) in session.frames.iter().enumerate() {
        let path = dir.join(frames::frame_file_name(i));
        let px = frame.load()?;
        let f = File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut w = BufWriter::new(f);
        w.write_all(&pgm::encode_pgm(frame.width, frame.height, &px))
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(&path, e))?;
    }
    let index_path = frames_dir.join("index.csv");
    std::fs::write(&index_path, frames::format_frame_index(&session.frames))
        .map_err(|e| Error::io(&index_path, e))
}
