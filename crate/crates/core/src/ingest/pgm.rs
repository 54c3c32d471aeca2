//! Binary PGM (P5), 8-bit only.

use std::fs::File;
use std::io::{BufReader, Read, Seek, SeekFrom};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::session::PixelSource;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PgmHeader {
    pub width: u32,
    pub height: u32,
    pub maxval: u32,
    /// Byte offset of the first pixel.
    pub data_offset: u64,
}

pub fn encode_pgm(width: u32, height: u32, pixels: &[u8]) -> Vec<u8> {
    let header = format!("P5\n{width} {height}\n255\n");
    let mut out = Vec::with_capacity(header.len() + pixels.len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(pixels);
    out
}

/// Parses the header from the start of `bytes`. Needs at most the header
/// bytes plus one separator.
pub fn parse_header(bytes: &[u8], path: &Path) -> Result<PgmHeader> {
    let bad = |msg: &str| Error::InvalidPgm {
        path: path.to_path_buf(),
        msg: msg.to_string(),
    };
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(bad("not a binary PGM (P5)"));
    }
    let mut pos = 2usize;
    let mut fields = [0u32; 3];
    for field in fields.iter_mut() {
        // whitespace and comments
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while !matches!(bytes.get(pos), Some(b'\n') | None) {
                        pos += 1;
                    }
                }
                Some(_) => break,
                None => return Err(bad("truncated header")),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(bad("expected a decimal number in header"));
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("header number out of range"))?;
    }
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(bad("missing separator after maxval")),
    }
    let [width, height, maxval] = fields;
    if width == 0 || height == 0 {
        return Err(bad("zero dimension"));
    }
    if maxval != 255 {
        return Err(Error::UnsupportedDepth {
            path: path.to_path_buf(),
            maxval,
        });
    }
    Ok(PgmHeader {
        width,
        height,
        maxval,
        data_offset: pos as u64,
    })
}

/// Reads and validates the header of a PGM file, checking that the file is
/// long enough to hold the pixel data.
pub fn read_header(path: &Path) -> Result<PgmHeader> {
    let mut file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut buf = Vec::with_capacity(256);
    (&mut file)
        .take(1024)
        .read_to_end(&mut buf)
        .map_err(|e| Error::io(path, e))?;
    let header = parse_header(&buf, path)?;
    let len = file.metadata().map_err(|e| Error::io(path, e))?.len();
    let need = header.data_offset + header.width as u64 * header.height as u64;
    if len < need {
        return Err(Error::InvalidPgm {
            path: path.to_path_buf(),
            msg: format!("file holds {len} bytes, header implies {need}"),
        });
    }
    Ok(header)
}

pub fn read_pgm(path: &Path) -> Result<(PgmHeader, Vec<u8>)> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let header = parse_header(&bytes, path)?;
    let start = header.data_offset as usize;
    let n = header.width as usize * header.height as usize;
    if bytes.len() < start + n {
        return Err(Error::InvalidPgm {
            path: path.to_path_buf(),
            msg: "truncated pixel data".into(),
        });
    }
    Ok((header, bytes[start..start + n].to_vec()))
}

/// Pixels of one PGM file, read from disk on every load.
#[derive(Debug, Clone)]
pub struct PgmFile {
    pub path: PathBuf,
    pub header: PgmHeader,
}

impl PixelSource for PgmFile {
    fn load(&self) -> Result<Arc<[u8]>> {
        let n = self.header.width as usize * self.header.height as usize;
        let mut file = BufReader::new(File::open(&self.path).map_err(|e| Error::io(&self.path, e))?);
        file.seek(SeekFrom::Start(self.header.data_offset))
            .map_err(|e| Error::io(&self.path, e))?;
        let mut px = vec![0u8; n];
        file.read_exact(&mut px).map_err(|e| Error::io(&self.path, e))?;
        Ok(px.into())
    }
}
