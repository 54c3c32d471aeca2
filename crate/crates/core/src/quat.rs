//! Unit quaternions in Hamilton convention, scalar first.
//!
//! `q` and `-q` encode the same rotation. Functions here are sign-insensitive
//! where the rotation is what matters (`geodesic_angle`) and sign-preserving
//! otherwise; sequences are made sign-continuous by
//! [`crate::fusion::hemisphere_align`].

use std::ops::{Mul, Neg};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Default for Quaternion {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl Quaternion {
    pub const IDENTITY: Quaternion = Quaternion {
        w: 1.0,
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    /// Rotation of `angle` radians about `axis`. The axis need not be unit
    /// length; a zero axis yields the identity.
    pub fn from_axis_angle(axis: [f64; 3], angle: f64) -> Self {
        let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if n == 0.0 {
            return Self::IDENTITY;
        }
        let (s, c) = (angle * 0.5).sin_cos();
        let k = s / n;
        Self::new(c, axis[0] * k, axis[1] * k, axis[2] * k)
    }

    /// Rotation whose axis is the direction of `v` and whose angle is `|v|`.
    pub fn from_rotation_vector(v: [f64; 3]) -> Self {
        let angle = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if angle < 1e-12 {
            // second-order expansion; exact to rounding at this size
            let q = Self::new(1.0, 0.5 * v[0], 0.5 * v[1], 0.5 * v[2]);
            return q.scaled(1.0 / q.norm());
        }
        Self::from_axis_angle(v, angle)
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dot(&self, other: &Quaternion) -> f64 {
        self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn is_finite(&self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    fn scaled(&self, k: f64) -> Self {
        Self::new(self.w * k, self.x * k, self.y * k, self.z * k)
    }

    pub fn normalize(&self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::DegenerateQuaternion);
        }
        Ok(self.scaled(1.0 / n))
    }

    /// Normalizes unless the norm is already 1 to within rounding, in which
    /// case the value is returned bit-for-bit. Persisted quaternions go
    /// through this on both write and read so that a round trip is exact.
    pub fn to_unit(&self) -> Result<Self> {
        let n = self.norm();
        if (n - 1.0).abs() <= 1e-14 {
            return Ok(*self);
        }
        self.normalize()
    }

    /// Conjugate. Equal to the inverse for unit quaternions.
    pub fn inverse(&self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    /// Hamilton product `self ⊗ rhs`.
    pub fn multiply(&self, rhs: &Quaternion) -> Self {
        let (a, b) = (self, rhs);
        Self::new(
            a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        )
    }

    /// Relative rotation `self⁻¹ ⊗ other`; exactly the identity when the two
    /// are bitwise equal.
    pub fn between(&self, other: &Quaternion) -> Self {
        if self == other {
            return Self::IDENTITY;
        }
        self.inverse().multiply(other)
    }

    /// Rotation angle of `self⁻¹ ⊗ other`, in `[0, π]`.
    ///
    /// Equal to `2·acos(|dot|)`, evaluated through `atan2` so that nearly
    /// coincident orientations keep full precision.
    pub fn geodesic_angle(&self, other: &Quaternion) -> f64 {
        let d = self.between(other);
        let v = (d.x * d.x + d.y * d.y + d.z * d.z).sqrt();
        2.0 * v.atan2(d.w.abs())
    }

    /// Logarithm map onto the rotation-vector half: a rotation of `θ` about
    /// `n̂` maps to `(θ/2)·n̂`, taking the short way round.
    pub fn log_vec(&self) -> [f64; 3] {
        let s = if self.w < 0.0 { -1.0 } else { 1.0 };
        let (w, x, y, z) = (self.w * s, self.x * s, self.y * s, self.z * s);
        let v = (x * x + y * y + z * z).sqrt();
        if v < 1e-300 {
            return [0.0; 3];
        }
        let half = v.atan2(w);
        let k = half / v;
        [x * k, y * k, z * k]
    }

    /// Inverse of [`Quaternion::log_vec`].
    pub fn exp_vec(v: [f64; 3]) -> Self {
        let half = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if half < 1e-300 {
            return Self::IDENTITY;
        }
        let (s, c) = half.sin_cos();
        let k = s / half;
        Self::new(c, v[0] * k, v[1] * k, v[2] * k)
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;

    fn mul(self, rhs: Quaternion) -> Quaternion {
        self.multiply(&rhs)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;

    fn neg(self) -> Quaternion {
        Quaternion::new(-self.w, -self.x, -self.y, -self.z)
    }
}
