//! Planar vectors, canonical angles and the polar / Frenet–Serret conversions.
//!
//! All angles are produced by `atan2` and canonicalized into `[0, 2π)`. A zero
//! vector has angle 0; this is the only convention used anywhere in the crate.

use core::fmt;
use core::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use crate::math::{self, TAU};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    /// Unit vector pointing along `angle` radians.
    pub fn from_angle(angle: f64) -> Self {
        Vec2::new(math::cos(angle), math::sin(angle))
    }

    #[inline]
    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    #[inline]
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        math::hypot(self.x, self.y)
    }

    #[inline]
    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    /// Counterclockwise quarter turn, `J·v` with `J = [[0, -1], [1, 0]]`.
    #[inline]
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    /// Rotates counterclockwise by `angle` radians.
    pub fn rotated(self, angle: f64) -> Vec2 {
        let (s, c) = (math::sin(angle), math::cos(angle));
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    /// Angle of the vector in `[0, 2π)`; the zero vector maps to 0.
    pub fn angle(self) -> Angle {
        if self.x == 0.0 && self.y == 0.0 {
            return Angle::ZERO;
        }
        Angle::wrap_unchecked(math::atan2(self.y, self.x))
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Vec2 {
    #[inline]
    fn add_assign(&mut self, rhs: Vec2) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl SubAssign for Vec2 {
    #[inline]
    fn sub_assign(&mut self, rhs: Vec2) {
        self.x -= rhs.x;
        self.y -= rhs.y;
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    #[inline]
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// An angle canonicalized into `[0, 2π)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd)]
pub struct Angle(f64);

impl Angle {
    pub const ZERO: Angle = Angle(0.0);

    /// Wraps a finite angle into `[0, 2π)`.
    pub fn wrap(theta: f64) -> Result<Angle> {
        if !theta.is_finite() {
            return Err(Error::NonFinite("angle"));
        }
        Ok(Angle::wrap_unchecked(theta))
    }

    pub(crate) fn wrap_unchecked(theta: f64) -> Angle {
        let mut r = theta % TAU;
        if r < 0.0 {
            r += TAU;
        }
        // -tiny % TAU + TAU rounds to exactly TAU
        if r >= TAU {
            r = 0.0;
        }
        Angle(r)
    }

    #[inline]
    pub fn radians(self) -> f64 {
        self.0
    }

    /// Shortest unsigned distance on the circle, in `[0, π]`.
    pub fn circular_distance(self, other: Angle) -> f64 {
        circular_distance(self.0, other.0)
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} rad", self.0)
    }
}

/// `theta` mod 2π in `[0, 2π)`.
pub fn wrap_angle(theta: f64) -> Result<Angle> {
    Angle::wrap(theta)
}

/// `min(|Δ|, 2π − |Δ|)` after reducing `a − b` onto the circle.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let delta = Angle::wrap_unchecked(a - b).0;
    if delta > TAU - delta {
        TAU - delta
    } else {
        delta
    }
}

/// Polar description of an agent's relative position and velocity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarCoords {
    /// Distance to the target.
    pub rho: f64,
    /// Relative speed.
    pub vbar: f64,
    /// Bearing of the relative position.
    pub alpha: Angle,
    /// Heading of the relative velocity.
    pub theta_bar: Angle,
    /// Heading relative to the bearing, `θ̄ − α`.
    pub beta: Angle,
}

pub fn to_polar(p_rel: Vec2, v_rel: Vec2) -> PolarCoords {
    let alpha = p_rel.angle();
    let theta_bar = v_rel.angle();
    PolarCoords {
        rho: p_rel.norm(),
        vbar: v_rel.norm(),
        alpha,
        theta_bar,
        beta: Angle::wrap_unchecked(theta_bar.0 - alpha.0),
    }
}

/// Expresses `v` in a frame whose x-axis points along `frame_angle`.
pub fn rotate_into_frame(v: Vec2, frame_angle: Angle) -> Vec2 {
    v.rotated(-frame_angle.0)
}
