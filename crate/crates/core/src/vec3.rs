//! Small real and complex 3-vector types used throughout the crate.
//!
//! Dot products never conjugate; complex vectors are stored as a pair of
//! real vectors and conjugation is always spelled out at the call site.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

/// Real 3-vector, serialized as `[x, y, z]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vec3(pub [f64; 3]);

impl Vec3 {
    pub const ZERO: Vec3 = Vec3([0.0, 0.0, 0.0]);
    pub const X: Vec3 = Vec3([1.0, 0.0, 0.0]);
    pub const Y: Vec3 = Vec3([0.0, 1.0, 0.0]);
    pub const Z: Vec3 = Vec3([0.0, 0.0, 1.0]);

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3([x, y, z])
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    pub fn cross(self, other: Vec3) -> Vec3 {
        Vec3([
            self.0[1] * other.0[2] - self.0[2] * other.0[1],
            self.0[2] * other.0[0] - self.0[0] * other.0[2],
            self.0[0] * other.0[1] - self.0[1] * other.0[0],
        ])
    }

    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm2().sqrt()
    }

    /// Unit vector in the same direction, or `None` for a vanishing input.
    pub fn normalized(self) -> Option<Vec3> {
        let n = self.norm();
        if n > 0.0 {
            Some(self * (1.0 / n))
        } else {
            None
        }
    }

    pub fn scale(self, k: f64) -> Vec3 {
        self * k
    }

    pub fn max_abs(self) -> f64 {
        self.0[0].abs().max(self.0[1].abs()).max(self.0[2].abs())
    }

    /// Largest absolute component difference; the metric used by the
    /// round-trip and equivariance checks.
    pub fn max_abs_diff(self, other: Vec3) -> f64 {
        (self - other).max_abs()
    }

    pub fn is_finite(self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3([-self.0[0], -self.0[1], -self.0[2]])
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, k: f64) -> Vec3 {
        Vec3([self.0[0] * k, self.0[1] * k, self.0[2] * k])
    }
}

/// Complex 3-vector stored as real and imaginary parts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CVec3 {
    pub re: Vec3,
    pub im: Vec3,
}

impl CVec3 {
    pub const ZERO: CVec3 = CVec3 { re: Vec3::ZERO, im: Vec3::ZERO };

    pub fn from_real(v: Vec3) -> Self {
        CVec3 { re: v, im: Vec3::ZERO }
    }

    pub fn conj(self) -> CVec3 {
        CVec3 { re: self.re, im: -self.im }
    }

    /// Componentwise multiplication by a complex scalar.
    pub fn phase_mul(self, c: Complex64) -> CVec3 {
        CVec3 {
            re: self.re * c.re - self.im * c.im,
            im: self.re * c.im + self.im * c.re,
        }
    }

    /// Unconjugated dot product `sum_a self_a other_a`.
    pub fn dot(self, other: CVec3) -> Complex64 {
        Complex64::new(
            self.re.dot(other.re) - self.im.dot(other.im),
            self.re.dot(other.im) + self.im.dot(other.re),
        )
    }

    pub fn dot_real(self, v: Vec3) -> Complex64 {
        Complex64::new(self.re.dot(v), self.im.dot(v))
    }

    /// Hermitian squared norm `sum_a |self_a|^2`.
    pub fn herm_norm2(self) -> f64 {
        self.re.norm2() + self.im.norm2()
    }

    /// Componentwise complex cross product.
    pub fn cross(self, other: CVec3) -> CVec3 {
        CVec3 {
            re: self.re.cross(other.re) - self.im.cross(other.im),
            im: self.re.cross(other.im) + self.im.cross(other.re),
        }
    }

    pub fn max_abs(self) -> f64 {
        self.re.0.iter().chain(self.im.0.iter()).fold(0.0f64, |m, c| m.max(c.abs()))
    }

    pub fn max_abs_diff(self, other: CVec3) -> f64 {
        (self - other).max_abs()
    }
}

impl Add for CVec3 {
    type Output = CVec3;
    fn add(self, o: CVec3) -> CVec3 {
        CVec3 { re: self.re + o.re, im: self.im + o.im }
    }
}

impl Sub for CVec3 {
    type Output = CVec3;
    fn sub(self, o: CVec3) -> CVec3 {
        CVec3 { re: self.re - o.re, im: self.im - o.im }
    }
}

/// Row-major 3x3 matrix; only rotations are ever constructed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub fn apply(self, v: Vec3) -> Vec3 {
        Vec3([
            self.0[0][0] * v.0[0] + self.0[0][1] * v.0[1] + self.0[0][2] * v.0[2],
            self.0[1][0] * v.0[0] + self.0[1][1] * v.0[1] + self.0[1][2] * v.0[2],
            self.0[2][0] * v.0[0] + self.0[2][1] * v.0[1] + self.0[2][2] * v.0[2],
        ])
    }

    /// Rodrigues rotation about a unit axis.
    pub fn rotation_about(axis: Vec3, angle: f64) -> Mat3 {
        let (s, c) = angle.sin_cos();
        let t = 1.0 - c;
        let [x, y, z] = axis.0;
        Mat3([
            [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
            [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
            [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
        ])
    }
}
