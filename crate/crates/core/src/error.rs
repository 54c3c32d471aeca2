use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate quaternion")]
    DegenerateQuaternion,

    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },

    #[error("timestamp regression at line {line}")]
    TimestampRegression { line: usize },

    #[error("no samples")]
    NoSamples,

    #[error("missing frame file {}", .0.display())]
    MissingFile(PathBuf),

    #[error("unsupported depth: maxval {maxval} in {}", .path.display())]
    UnsupportedDepth { path: PathBuf, maxval: u32 },

    #[error("invalid PGM {}: {msg}", .path.display())]
    InvalidPgm { path: PathBuf, msg: String },

    #[error("frame geometry changed: {} is {}x{}, session is {}x{}", .path.display(), .got.0, .got.1, .expected.0, .expected.1)]
    FrameGeometryChanged {
        path: PathBuf,
        expected: (u32, u32),
        got: (u32, u32),
    },

    #[error("unknown role; expected expert|novice|unknown")]
    UnknownRole(String),

    #[error("rates must be positive")]
    NonPositiveRate,

    #[error("invalid manifest: {0}")]
    Manifest(String),

    #[error("cannot interpolate: need at least 2 poses, got {0}")]
    CannotInterpolate(usize),

    #[error("streams do not overlap in time")]
    NoOverlap,

    #[error("interpolation parameter {0} outside [0, 1]")]
    ParameterOutOfRange(f64),

    #[error("empty co-occurrence: offset ({dx}, {dy}) has no valid pixel pairs")]
    EmptyCooccurrence { dx: i32, dy: i32 },

    #[error("co-occurrence matrix not normalized (sum = {0})")]
    Unnormalized(f64),

    #[error("roi ({x}, {y}, {w}, {h}) outside {width}x{height} frame")]
    RoiOutOfBounds {
        x: u32,
        y: u32,
        w: u32,
        h: u32,
        width: u32,
        height: u32,
    },

    #[error("no motion")]
    NoMotion,

    #[error("series too short: need at least {need} samples, got {got}")]
    SeriesTooShort { need: usize, got: usize },

    #[error("non-uniform grid at index {0}")]
    NonUniformGrid(usize),

    #[error("incomparable grids: {a} us vs {b} us")]
    IncomparableGrids { a: u64, b: u64 },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", .path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
