use std::fs;

use proptest::prelude::*;

use sonoskill::ingest::pose_csv::format_pose_csv;
use sonoskill::ingest::{read_pose_csv, read_session, validate_session, write_session};
use sonoskill::{Error, Frame, PoseSample, Quaternion, Role, Session, SessionMeta};

fn meta() -> SessionMeta {
    SessionMeta {
        session_id: "rt".into(),
        participant_role: Role::Novice,
        trial: 2,
        pose_rate_hz: 100.0,
        frame_rate_hz: 25.0,
    }
}

fn small_session() -> Session {
    let poses = (0..40u64)
        .map(|k| PoseSample::new(k * 10_000, Quaternion::from_axis_angle([0.1, 0.7, -0.2], k as f64 * 0.013)))
        .collect();
    let frames = (0..10u64)
        .map(|k| {
            let px = (0..12 * 9).map(|i| ((i as u64 * 7 + k * 31) % 256) as u8).collect();
            Frame::from_pixels(k * 40_000, 12, 9, px).unwrap()
        })
        .collect();
    Session::new(meta(), poses, frames)
}

#[test]
fn session_round_trips_losslessly() {
    let dir = tempfile::tempdir().unwrap();
    let s = small_session();
    write_session(&s, dir.path(), None).unwrap();
    for f in ["manifest.json", "pose.csv", "frames/index.csv", "frames/000000.pgm", "frames/000009.pgm"] {
        assert!(dir.path().join(f).is_file(), "{f}");
    }
    let back = read_session(dir.path()).unwrap();
    assert_eq!(back.meta, s.meta);
    assert_eq!(back.poses, s.poses);
    assert_eq!(back.frames.len(), s.frames.len());
    for (a, b) in s.frames.iter().zip(&back.frames) {
        assert_eq!((a.t, a.width, a.height), (b.t, b.width, b.height));
        assert_eq!(a.load().unwrap(), b.load().unwrap());
    }
    assert!(validate_session(&back).is_clean());

    // writing the re-read session gives identical bytes
    let again = tempfile::tempdir().unwrap();
    write_session(&back, again.path(), None).unwrap();
    for f in ["manifest.json", "pose.csv", "frames/index.csv", "frames/000004.pgm"] {
        assert_eq!(fs::read(dir.path().join(f)).unwrap(), fs::read(again.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn missing_frame_file_is_named() {
    let dir = tempfile::tempdir().unwrap();
    write_session(&small_session(), dir.path(), None).unwrap();
    fs::remove_file(dir.path().join("frames/000003.pgm")).unwrap();
    let err = read_session(dir.path()).unwrap_err();
    assert!(matches!(err, Error::MissingFile(_)));
    assert!(err.to_string().contains("frames/000003.pgm"), "{err}");
}

#[test]
fn unknown_manifest_key_rejected() {
    let dir = tempfile::tempdir().unwrap();
    write_session(&small_session(), dir.path(), None).unwrap();
    let path = dir.path().join("manifest.json");
    let text = fs::read_to_string(&path).unwrap().replacen('{', "{\n  \"operator\": \"x\",", 1);
    fs::write(&path, text).unwrap();
    assert!(read_session(dir.path()).is_err());
}

#[test]
fn pose_csv_spec_cases() {
    let one = read_pose_csv("t_us,w,x,y,z\n0,2,0,0,0\n".as_bytes()).unwrap();
    assert_eq!(one, vec![PoseSample::new(0, Quaternion::IDENTITY)]);
    let err = read_pose_csv("t_us,w,x,y,z\n10,1,0,0,0\n5,1,0,0,0".as_bytes()).unwrap_err();
    assert_eq!(err.to_string(), "timestamp regression at line 3");
}

proptest! {
    #[test]
    fn pose_csv_length_matches_data_lines(
        steps in prop::collection::vec((1u64..100_000, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0), 0..60)
    ) {
        let mut t = 0u64;
        let mut text = String::from("t_us,w,x,y,z\n");
        let mut lines = 0usize;
        for (dt, w, x, y, z) in steps {
            if (w * w + x * x + y * y + z * z).sqrt() < 1e-3 {
                continue;
            }
            t += dt;
            text.push_str(&format!("{t},{w},{x},{y},{z}\n"));
            lines += 1;
        }
        if lines == 0 {
            prop_assert!(matches!(read_pose_csv(text.as_bytes()), Err(Error::NoSamples)));
            return Ok(());
        }
        let poses = read_pose_csv(text.as_bytes()).unwrap();
        prop_assert_eq!(poses.len(), lines);
        for p in &poses {
            prop_assert!((p.q.norm() - 1.0).abs() <= 1e-9);
        }
        // formatting and re-reading is exact
        prop_assert_eq!(read_pose_csv(format_pose_csv(&poses).as_bytes()).unwrap(), poses);
    }
}
