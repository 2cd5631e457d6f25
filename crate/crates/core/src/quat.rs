//! Hamilton quaternions.
//!
//! Storage is scalar-first `(w, x, y, z)` for `w + x·i + y·j + z·k`, with
//! `i² = j² = k² = −1` and `ij = k`, `jk = i`, `ki = j`.
//!
//! [`Quaternion`] is the raw algebra. [`UnitQuaternion`] is normalized once at
//! construction and plays the role of a phase factor. [`PureAxis`] picks the
//! imaginary direction that generalizes `i` in `exp(iφ)`.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest norm accepted when normalizing into a [`UnitQuaternion`] or [`PureAxis`].
pub const MIN_NORM: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    #[inline]
    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    #[inline]
    pub const fn from_real(w: f64) -> Self {
        Self::new(w, 0.0, 0.0, 0.0)
    }

    #[inline]
    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    #[inline]
    pub fn from_array(c: [f64; 4]) -> Self {
        Self::new(c[0], c[1], c[2], c[3])
    }

    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Scalar (real) part.
    #[inline]
    pub fn scalar(self) -> f64 {
        self.w
    }

    /// Vector part as `(x, y, z)`.
    #[inline]
    pub fn vector(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    #[inline]
    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    #[inline]
    pub fn norm_squared(self) -> f64 {
        self.dot4(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        // hypot-style scaling keeps tiny and huge components from under/overflowing
        let m = self
            .w
            .abs()
            .max(self.x.abs())
            .max(self.y.abs())
            .max(self.z.abs());
        if m == 0.0 || !m.is_finite() {
            return m;
        }
        let s = self.scale(1.0 / m);
        m * s.norm_squared().sqrt()
    }

    /// Euclidean inner product of the component 4-vectors. Equals the scalar
    /// part of `self * other.conj()`.
    #[inline]
    pub fn dot4(self, other: Self) -> f64 {
        self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z
    }

    #[inline]
    pub fn scale(self, s: f64) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    /// Angle between the two 4-vectors in `[0, π]`, computed as
    /// `2·atan2(|p̂ − q̂|, |p̂ + q̂|)` which stays accurate near 0 and π.
    pub fn angle_between(self, other: Self) -> f64 {
        let p = self.scale(1.0 / self.norm());
        let q = other.scale(1.0 / other.norm());
        2.0 * (p - q).norm().atan2((p + q).norm())
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn add(self, r: Quaternion) -> Quaternion {
        Quaternion::new(self.w + r.w, self.x + r.x, self.y + r.y, self.z + r.z)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn sub(self, r: Quaternion) -> Quaternion {
        Quaternion::new(self.w - r.w, self.x - r.x, self.y - r.y, self.z - r.z)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.w, -self.x, -self.y, -self.z)
    }
}

/// Hamilton product.
impl Mul for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn mul(self, rhs: Quaternion) -> Quaternion {
        let (a1, b1, c1, d1) = (self.w, self.x, self.y, self.z);
        let (a2, b2, c2, d2) = (rhs.w, rhs.x, rhs.y, rhs.z);
        Quaternion::new(
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn mul(self, s: f64) -> Quaternion {
        self.scale(s)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    #[inline]
    fn mul(self, q: Quaternion) -> Quaternion {
        q.scale(self)
    }
}

/// Free-function form of the Hamilton product.
#[inline]
pub fn mul(p: Quaternion, q: Quaternion) -> Quaternion {
    p * q
}

#[inline]
pub fn conj(q: Quaternion) -> Quaternion {
    q.conj()
}

#[inline]
pub fn norm(q: Quaternion) -> f64 {
    q.norm()
}

#[inline]
pub fn dot4(p: Quaternion, q: Quaternion) -> f64 {
    p.dot4(q)
}

/// A quaternion of unit norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct UnitQuaternion(Quaternion);

impl UnitQuaternion {
    pub const ONE: UnitQuaternion = UnitQuaternion(Quaternion::ONE);
    pub const I: UnitQuaternion = UnitQuaternion(Quaternion::I);
    pub const J: UnitQuaternion = UnitQuaternion(Quaternion::J);
    pub const K: UnitQuaternion = UnitQuaternion(Quaternion::K);

    /// Normalizes `q`. Rejects non-finite input and norms below [`MIN_NORM`].
    pub fn new(q: Quaternion) -> Result<Self> {
        if !q.is_finite() {
            return Err(Error::InvalidInput(format!("non-finite quaternion {q:?}")));
        }
        let n = q.norm();
        if n < MIN_NORM {
            return Err(Error::InvalidInput(format!(
                "quaternion norm {n:.3e} too small to normalize"
            )));
        }
        Ok(Self(q.scale(1.0 / n)))
    }

    /// `cos θ + sin θ · axis`.
    pub fn from_axis_angle(axis: PureAxis, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self(Quaternion::new(c, s * axis.x, s * axis.y, s * axis.z))
    }

    /// Complex phase factor `exp(iφ)`.
    pub fn from_phase(phase: f64) -> Self {
        Self::from_axis_angle(PureAxis::I, phase)
    }

    #[inline]
    pub fn get(self) -> Quaternion {
        self.0
    }

    #[inline]
    pub fn conj(self) -> Self {
        Self(self.0.conj())
    }

    /// Product of two unit quaternions. Not renormalized.
    #[inline]
    pub fn compose(self, rhs: Self) -> Self {
        Self(self.0 * rhs.0)
    }

    #[inline]
    pub fn dot4(self, other: Self) -> f64 {
        self.0.dot4(other.0)
    }
}

impl From<UnitQuaternion> for Quaternion {
    fn from(u: UnitQuaternion) -> Quaternion {
        u.0
    }
}

/// `exp(angle · axis) = cos(angle) + sin(angle)·axis`.
pub fn exp_pure(axis: PureAxis, angle: f64) -> UnitQuaternion {
    UnitQuaternion::from_axis_angle(axis, angle)
}

/// Unit vector in the span of `i, j, k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PureAxis {
    x: f64,
    y: f64,
    z: f64,
}

impl PureAxis {
    pub const I: PureAxis = PureAxis {
        x: 1.0,
        y: 0.0,
        z: 0.0,
    };
    pub const J: PureAxis = PureAxis {
        x: 0.0,
        y: 1.0,
        z: 0.0,
    };
    pub const K: PureAxis = PureAxis {
        x: 0.0,
        y: 0.0,
        z: 1.0,
    };

    /// Normalizes `(x, y, z)`.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite() && z.is_finite()) {
            return Err(Error::InvalidInput("non-finite axis".into()));
        }
        let n = (x * x + y * y + z * z).sqrt();
        if n < MIN_NORM {
            return Err(Error::InvalidInput(format!(
                "axis ({x}, {y}, {z}) has norm {n:.3e}"
            )));
        }
        Ok(Self {
            x: x / n,
            y: y / n,
            z: z / n,
        })
    }

    #[inline]
    pub fn components(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// The axis as the pure quaternion `x·i + y·j + z·k`.
    #[inline]
    pub fn as_quaternion(self) -> Quaternion {
        Quaternion::new(0.0, self.x, self.y, self.z)
    }

    #[inline]
    pub fn dot(self, other: PureAxis) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }
}
