use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::session::{Role, SessionMeta};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestFile {
    session_id: String,
    participant_role: String,
    trial: i64,
    pose_rate_hz: f64,
    frame_rate_hz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    synthetic_profile: Option<serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub meta: SessionMeta,
    /// Generator parameters for synthetic sessions.
    pub synthetic_profile: Option<serde_json::Value>,
}

pub fn parse_manifest(text: &str, path: &Path) -> Result<Manifest> {
    let raw: ManifestFile = serde_json::from_str(text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    let participant_role: Role = raw.participant_role.parse()?;
    if raw.trial < 1 || raw.trial > u32::MAX as i64 {
        return Err(Error::Manifest(format!("trial must be >= 1, got {}", raw.trial)));
    }
    let meta = SessionMeta {
        session_id: raw.session_id,
        participant_role,
        trial: raw.trial as u32,
        pose_rate_hz: raw.pose_rate_hz,
        frame_rate_hz: raw.frame_rate_hz,
    };
    meta.validate()?;
    Ok(Manifest {
        meta,
        synthetic_profile: raw.synthetic_profile,
    })
}

pub fn format_manifest(meta: &SessionMeta, synthetic_profile: Option<&serde_json::Value>) -> String {
    let raw = ManifestFile {
        session_id: meta.session_id.clone(),
        participant_role: meta.participant_role.as_str().to_string(),
        trial: meta.trial as i64,
        pose_rate_hz: meta.pose_rate_hz,
        frame_rate_hz: meta.frame_rate_hz,
        synthetic_profile: synthetic_profile.cloned(),
    };
    let mut s = serde_json::to_string_pretty(&raw).expect("manifest serializes");
    s.push('\n');
    s
}

pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    let path = dir.join(MANIFEST_FILE);
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    parse_manifest(&text, &path)
}

pub fn write_manifest(
    dir: &Path,
    meta: &SessionMeta,
    synthetic_profile: Option<&serde_json::Value>,
) -> Result<()> {
    meta.validate()?;
    let path = dir.join(MANIFEST_FILE);
    std::fs::write(&path, format_manifest(meta, synthetic_profile)).map_err(|e| Error::io(&path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta() -> SessionMeta {
        SessionMeta {
            session_id: "clinician01-trial01".into(),
            participant_role: Role::Expert,
            trial: 1,
            pose_rate_hz: 100.0,
            frame_rate_hz: 25.0,
        }
    }

    #[test]
    fn round_trip() {
        let tmp = tempfile::tempdir().unwrap();
        write_manifest(tmp.path(), &meta(), None).unwrap();
        let m = read_manifest(tmp.path()).unwrap();
        assert_eq!(m.meta, meta());
        assert!(m.synthetic_profile.is_none());

        let profile = serde_json::json!({"kind": "expert", "seed": 3});
        write_manifest(tmp.path(), &meta(), Some(&profile)).unwrap();
        assert_eq!(read_manifest(tmp.path()).unwrap().synthetic_profile, Some(profile));
    }

    #[test]
    fn unknown_role() {
        let text = r#"{"session_id":"a","participant_role":"sonographer","trial":1,"pose_rate_hz":100,"frame_rate_hz":25}"#;
        let err = parse_manifest(text, Path::new("manifest.json")).unwrap_err();
        assert_eq!(err.to_string(), "unknown role; expected expert|novice|unknown");
    }

    #[test]
    fn zero_rate() {
        let text = r#"{"session_id":"a","participant_role":"expert","trial":1,"pose_rate_hz":0,"frame_rate_hz":25}"#;
        let err = parse_manifest(text, Path::new("manifest.json")).unwrap_err();
        assert_eq!(err.to_string(), "rates must be positive");
    }

    #[test]
    fn unknown_key_and_bad_trial() {
        let text = r#"{"session_id":"a","participant_role":"expert","trial":1,"pose_rate_hz":1,"frame_rate_hz":25,"probe":"C5-1"}"#;
        assert!(parse_manifest(text, Path::new("m")).is_err());
        let text = r#"{"session_id":"a","participant_role":"expert","trial":0,"pose_rate_hz":1,"frame_rate_hz":25}"#;
        assert!(parse_manifest(text, Path::new("m")).is_err());
    }
}
