use crate::error::{Error, Result};
use crate::quat::Quaternion;
use crate::session::PoseSample;

/// Below this full rotation angle (radians) SLERP degrades to normalized
/// linear interpolation.
pub const SLERP_LINEAR_THRESHOLD: f64 = 1e-7;

/// Flips signs so that consecutive quaternions have non-negative dot
/// products. The rotations are unchanged.
pub fn hemisphere_align(poses: &[PoseSample]) -> Vec<PoseSample> {
    let mut out = Vec::with_capacity(poses.len());
    let mut prev: Option<Quaternion> = None;
    for p in poses {
        let q = match prev {
            Some(r) if r.dot(&p.q) < 0.0 => -p.q,
            _ => p.q,
        };
        prev = Some(q);
        out.push(PoseSample { t: p.t, q });
    }
    out
}

/// Spherical linear interpolation from `a` (u = 0) to `b` (u = 1).
///
/// Inputs are expected hemisphere-aligned; if they are not, `b` is negated
/// so the result still follows the shortest arc.
pub fn slerp(a: &Quaternion, b: &Quaternion, u: f64) -> Result<Quaternion> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::ParameterOutOfRange(u));
    }
    Ok(slerp_unchecked(a, b, u))
}

pub(crate) fn slerp_unchecked(a: &Quaternion, b: &Quaternion, u: f64) -> Quaternion {
    if u == 0.0 {
        return *a;
    }
    if u == 1.0 {
        return *b;
    }
    if a == b {
        return *a;
    }
    let (b, dot) = {
        let d = a.dot(b);
        if d < 0.0 {
            (-*b, -d)
        } else {
            (*b, d)
        }
    };
    // half-angle between a and b, robust near coincidence
    let diff = a.between(&b);
    let sin_half = (diff.x * diff.x + diff.y * diff.y + diff.z * diff.z).sqrt();
    let half = sin_half.atan2(dot);

    let (ka, kb) = if 2.0 * half < SLERP_LINEAR_THRESHOLD {
        (1.0 - u, u)
    } else {
        let s = half.sin();
        (((1.0 - u) * half).sin() / s, (u * half).sin() / s)
    };
    let q = Quaternion::new(
        ka * a.w + kb * b.w,
        ka * a.x + kb * b.x,
        ka * a.y + kb * b.y,
        ka * a.z + kb * b.z,
    );
    let n = q.norm();
    Quaternion::new(q.w / n, q.x / n, q.y / n, q.z / n)
}
