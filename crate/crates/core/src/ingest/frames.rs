use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ingest::pgm::{read_header, PgmFile};
use crate::session::{Frame, Pixels, Timestamp};

pub const INDEX_HEADER: &str = "t_us,file";
pub const FRAMES_DIR: &str = "frames";

pub fn frame_file_name(idx: usize) -> String {
    format!("{FRAMES_DIR}/{idx:06}.pgm")
}

/// Reads `frames/index.csv` under `dir` and validates every referenced PGM
/// header. Pixels are left on disk and fetched on demand.
pub fn read_frame_index(dir: &Path) -> Result<Vec<Frame>> {
    let index_path = dir.join(FRAMES_DIR).join("index.csv");
    if !index_path.exists() {
        return Err(Error::MissingFile(Path::new(FRAMES_DIR).join("index.csv")));
    }
    let text = std::fs::read_to_string(&index_path).map_err(|e| Error::io(&index_path, e))?;

    let mut frames = Vec::new();
    let mut geometry: Option<(u32, u32)> = None;
    let mut last: Option<u64> = None;
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.trim_end_matches('\r');
        if lineno == 1 {
            if line.trim() != INDEX_HEADER {
                return Err(Error::Malformed {
                    line: 1,
                    msg: format!("expected header `{INDEX_HEADER}` in frames/index.csv"),
                });
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let (t, file) = line.split_once(',').ok_or_else(|| Error::Malformed {
            line: lineno,
            msg: "expected `t_us,file`".into(),
        })?;
        let t: u64 = t.trim().parse().map_err(|_| Error::Malformed {
            line: lineno,
            msg: format!("bad t_us `{t}`"),
        })?;
        if last.is_some_and(|prev| t <= prev) {
            return Err(Error::TimestampRegression { line: lineno });
        }
        last = Some(t);

        let rel = Path::new(file.trim());
        let path = dir.join(rel);
        if !path.is_file() {
            return Err(Error::MissingFile(rel.to_path_buf()));
        }
        let header = read_header(&path)?;
        let dims = (header.width, header.height);
        match geometry {
            None => geometry = Some(dims),
            Some(expected) if expected != dims => {
                return Err(Error::FrameGeometryChanged {
                    path: rel.to_path_buf(),
                    expected,
                    got: dims,
                })
            }
            Some(_) => {}
        }
        frames.push(Frame {
            t: Timestamp(t),
            width: header.width,
            height: header.height,
            pixels: Pixels::Deferred(Arc::new(PgmFile { path, header })),
        });
    }
    Ok(frames)
}

pub fn format_frame_index(frames: &[Frame]) -> String {
    let mut s = String::from(INDEX_HEADER);
    s.push('\n');
    for (i, f) in frames.iter().enumerate() {
        let _ = writeln!(s, "{},{}", f.t, frame_file_name(i));
    }
    s
}
