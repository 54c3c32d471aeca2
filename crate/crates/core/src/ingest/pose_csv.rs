use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read};

use crate::error::{Error, Result};
use crate::ingest::QuaternionOrder;
use crate::session::{NormOutlier, PoseSample, Timestamp};

pub const POSE_HEADER: &str = "t_us,w,x,y,z";
/// Header of IMU exports in scalar-last order.
pub const POSE_HEADER_SCALAR_LAST: &str = "t_us,x,y,z,w";

/// Norm deviation above which a raw quaternion is reported as an outlier.
/// It is still normalized.
pub const RENORMALIZE_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Default)]
pub struct PoseCsv {
    pub samples: Vec<PoseSample>,
    pub norm_outliers: Vec<NormOutlier>,
}

/// Reads `t_us,w,x,y,z` records. Every quaternion is normalized.
pub fn read_pose_csv<R: Read>(source: R) -> Result<Vec<PoseSample>> {
    read_pose_csv_detailed(source).map(|p| p.samples)
}

/// Like [`read_pose_csv`], also reporting raw quaternions whose norm was
/// off by more than [`RENORMALIZE_TOLERANCE`].
pub fn read_pose_csv_detailed<R: Read>(source: R) -> Result<PoseCsv> {
    read_pose_csv_ordered(source, QuaternionOrder::ScalarFirst)
}

/// Reads poses whose components are laid out per `order`; the header must
/// name the columns in that order. Output is always Hamilton scalar-first.
pub fn read_pose_csv_ordered<R: Read>(source: R, order: QuaternionOrder) -> Result<PoseCsv> {
    let header = match order {
        QuaternionOrder::ScalarFirst => POSE_HEADER,
        QuaternionOrder::ScalarLast => POSE_HEADER_SCALAR_LAST,
    };
    let reader = BufReader::new(source);
    let mut out = PoseCsv::default();
    let mut saw_header = false;
    let mut last: Option<u64> = None;

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::Malformed {
            line: lineno,
            msg: e.to_string(),
        })?;
        let line = line.trim_end_matches('\r');
        if !saw_header {
            if line.trim() != header {
                return Err(Error::Malformed {
                    line: lineno,
                    msg: format!("expected header `{header}`"),
                });
            }
            saw_header = true;
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }

        let malformed = |msg: String| Error::Malformed { line: lineno, msg };
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 5 {
            return Err(malformed(format!("expected 5 fields, got {}", fields.len())));
        }
        let t: u64 = fields[0]
            .parse()
            .map_err(|_| malformed(format!("bad t_us `{}`", fields[0])))?;
        let mut c = [0.0f64; 4];
        for (slot, f) in c.iter_mut().zip(&fields[1..]) {
            *slot = f
                .parse()
                .map_err(|_| malformed(format!("bad component `{f}`")))?;
            if !slot.is_finite() {
                return Err(malformed(format!("non-finite component `{f}`")));
            }
        }
        if let Some(prev) = last {
            if t <= prev {
                return Err(Error::TimestampRegression { line: lineno });
            }
        }
        last = Some(t);

        let raw = order.to_hamilton(c);
        let norm = raw.norm();
        let q = raw
            .to_unit()
            .map_err(|_| malformed("degenerate quaternion".into()))?;
        if (norm - 1.0).abs() > RENORMALIZE_TOLERANCE {
            out.norm_outliers.push(NormOutlier {
                line: lineno,
                t: Timestamp(t),
                norm,
            });
        }
        out.samples.push(PoseSample { t: Timestamp(t), q });
    }

    if out.samples.is_empty() {
        return Err(Error::NoSamples);
    }
    Ok(out)
}

pub fn format_pose_csv(poses: &[PoseSample]) -> String {
    let mut s = String::with_capacity(32 * (poses.len() + 1));
    s.push_str(POSE_HEADER);
    s.push('\n');
    for p in poses {
        let _ = writeln!(s, "{},{},{},{},{}", p.t, p.q.w, p.q.x, p.q.y, p.q.z);
    }
    s
}
