use std::fmt;

use crate::ingest::pose_csv::RENORMALIZE_TOLERANCE;
use crate::session::{Session, Timestamp};

/// A gap is reported when consecutive samples are further apart than this
/// many nominal periods.
pub const GAP_PERIODS: f64 = 5.0;
/// Allowed pose/frame span mismatch as a fraction of the shorter span.
pub const SPAN_MISMATCH_FRACTION: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Poses,
    Frames,
}

impl fmt::Display for Stream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stream::Poses => "poses",
            Stream::Frames => "frames",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Finding {
    EmptyStream(Stream),
    TimestampRegression {
        stream: Stream,
        index: usize,
        t: Timestamp,
        prev: Timestamp,
    },
    NonUnitQuaternion {
        t: Timestamp,
        norm: f64,
    },
    SpanMismatch {
        pose_span_us: u64,
        frame_span_us: u64,
    },
    Gap {
        stream: Stream,
        from: Timestamp,
        to: Timestamp,
    },
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Finding::EmptyStream(s) => write!(f, "empty stream: {s}"),
            Finding::TimestampRegression { stream, index, t, prev } => write!(
                f,
                "timestamp regression in {stream} at index {index}: {t} us after {prev} us"
            ),
            Finding::NonUnitQuaternion { t, norm } => {
                write!(f, "non-unit quaternion at {t} us: norm {norm}")
            }
            Finding::SpanMismatch {
                pose_span_us,
                frame_span_us,
            } => write!(
                f,
                "span mismatch: poses span {pose_span_us} us, frames span {frame_span_us} us"
            ),
            Finding::Gap { stream, from, to } => write!(
                f,
                "gap in {stream}: {} us between {from} us and {to} us",
                to.0 - from.0
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.findings.is_empty()
    }
}

fn check_stream(
    stream: Stream,
    times: impl Iterator<Item = Timestamp>,
    rate_hz: f64,
    findings: &mut Vec<Finding>,
) -> Option<(Timestamp, Timestamp)> {
    let max_gap_us = GAP_PERIODS * 1e6 / rate_hz;
    let mut first = None;
    let mut prev: Option<Timestamp> = None;
    for (index, t) in times.enumerate() {
        first.get_or_insert(t);
        if let Some(p) = prev {
            if t <= p {
                findings.push(Finding::TimestampRegression {
                    stream,
                    index,
                    t,
                    prev: p,
                });
            } else if (t.0 - p.0) as f64 > max_gap_us {
                findings.push(Finding::Gap {
                    stream,
                    from: p,
                    to: t,
                });
            }
        }
        prev = Some(t);
    }
    match (first, prev) {
        (Some(a), Some(b)) => Some((a, b)),
        _ => {
            findings.push(Finding::EmptyStream(stream));
            None
        }
    }
}

/// Inspects a session and lists what is wrong with it. Never fails.
pub fn validate_session(s: &Session) -> ValidationReport {
    let mut findings = Vec::new();

    let pose_span = check_stream(
        Stream::Poses,
        s.poses.iter().map(|p| p.t),
        s.meta.pose_rate_hz,
        &mut findings,
    );
    let frame_span = check_stream(
        Stream::Frames,
        s.frames.iter().map(|f| f.t),
        s.meta.frame_rate_hz,
        &mut findings,
    );

    for p in &s.poses {
        let norm = p.q.norm();
        if !((norm - 1.0).abs() <= RENORMALIZE_TOLERANCE) {
            findings.push(Finding::NonUnitQuaternion { t: p.t, norm });
        }
    }
    for o in &s.norm_outliers {
        findings.push(Finding::NonUnitQuaternion {
            t: o.t,
            norm: o.norm,
        });
    }

    if let (Some((p0, p1)), Some((f0, f1))) = (pose_span, frame_span) {
        let ps = p1.0.saturating_sub(p0.0);
        let fs = f1.0.saturating_sub(f0.0);
        let shorter = ps.min(fs) as f64;
        if ps.abs_diff(fs) as f64 > SPAN_MISMATCH_FRACTION * shorter {
            findings.push(Finding::SpanMismatch {
                pose_span_us: ps,
                frame_span_us: fs,
            });
        }
    }

    ValidationReport { findings }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::Quaternion;
    use crate::session::{Frame, NormOutlier, PoseSample, Role, SessionMeta};

    fn meta() -> SessionMeta {
        SessionMeta {
            session_id: "v".into(),
            participant_role: Role::Unknown,
            trial: 1,
            pose_rate_hz: 100.0,
            frame_rate_hz: 25.0,
        }
    }

    fn poses(times: impl IntoIterator<Item = u64>) -> Vec<PoseSample> {
        times
            .into_iter()
            .map(|t| PoseSample::new(t, Quaternion::IDENTITY))
            .collect()
    }

    fn frames(times: impl IntoIterator<Item = u64>) -> Vec<Frame> {
        times
            .into_iter()
            .map(|t| Frame::from_pixels(t, 2, 2, vec![0; 4]).unwrap())
            .collect()
    }

    #[test]
    fn clean_session() {
        let s = Session::new(meta(), poses((0..=100).map(|k| k * 10_000)), frames((0..=25).map(|k| k * 40_000)));
        assert!(validate_session(&s).is_clean());
    }

    #[test]
    fn single_gap() {
        // 100 ms hole at 100 Hz nominal
        let times: Vec<u64> = (0..=100u64)
            .map(|k| k * 10_000)
            .filter(|t| !(310_000..400_000).contains(t))
            .collect();
        let s = Session::new(meta(), poses(times), frames((0..=25).map(|k| k * 40_000)));
        let r = validate_session(&s);
        assert_eq!(
            r.findings,
            vec![Finding::Gap {
                stream: Stream::Poses,
                from: Timestamp(300_000),
                to: Timestamp(400_000),
            }]
        );
    }

    #[test]
    fn empty_frames() {
        let s = Session::new(meta(), poses([0, 10_000]), Vec::new());
        let r = validate_session(&s);
        assert_eq!(r.findings, vec![Finding::EmptyStream(Stream::Frames)]);
        assert_eq!(r.findings[0].to_string(), "empty stream: frames");
    }

    #[test]
    fn regression_norm_and_span() {
        let mut p = poses([0, 10_000, 5_000, 20_000]);
        p[1].q = Quaternion::new(1.01, 0.0, 0.0, 0.0);
        let mut s = Session::new(meta(), p, frames([0, 40_000, 80_000]));
        s.norm_outliers.push(NormOutlier {
            line: 2,
            t: Timestamp(0),
            norm: 2.0,
        });
        let r = validate_session(&s);
        assert!(r.findings.iter().any(|f| matches!(
            f,
            Finding::TimestampRegression { stream: Stream::Poses, index: 2, .. }
        )));
        assert_eq!(
            r.findings
                .iter()
                .filter(|f| matches!(f, Finding::NonUnitQuaternion { .. }))
                .count(),
            2
        );
        assert!(r.findings.iter().any(|f| matches!(f, Finding::SpanMismatch { .. })));
    }
}
