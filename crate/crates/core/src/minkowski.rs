//! Flat Minkowski tensor algebra in signature (-,+,+,+), geometric units (c = 1).
//!
//! Index 0 is the time component. Everything here is closed-form; the
//! coordinates are the global inertial (normal) coordinates of `eta`, so the
//! connection coefficients vanish and covariant derivatives along a curve are
//! plain parameter derivatives.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Diagonal of the Minkowski metric.
pub const SIGNATURE: [f64; 4] = [-1.0, 1.0, 1.0, 1.0];

/// Tolerance used when a routine requires an `eta`-normalized velocity.
pub const NORMALIZATION_TOL: f64 = 1e-10;

/// The fixed metric signature `diag(-1, 1, 1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MetricSignature;

impl MetricSignature {
    pub const fn diag(self) -> [f64; 4] {
        SIGNATURE
    }

    /// The metric as a 4x4 matrix.
    pub fn matrix(self) -> Matrix4<f64> {
        Matrix4::from_diagonal(&Vector4::from(SIGNATURE))
    }
}

/// Contravariant four-vector `v^mu`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FourVector(pub [f64; 4]);

/// Covariant four-vector `v_mu`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FourCovector(pub [f64; 4]);

impl FourVector {
    pub const ZERO: FourVector = FourVector([0.0; 4]);

    pub const fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        FourVector([t, x, y, z])
    }

    /// Unit basis vector `e_i`.
    pub fn basis(i: usize) -> Self {
        let mut v = [0.0; 4];
        v[i] = 1.0;
        FourVector(v)
    }

    /// Builds a vector from its spatial part, completing the time component
    /// so that `eta(v, v) = -norm` with `v^0 > 0`.
    pub fn complete_timelike(spatial: [f64; 3], norm: f64) -> Self {
        let s2: f64 = spatial.iter().map(|c| c * c).sum();
        FourVector([(norm + s2).sqrt(), spatial[0], spatial[1], spatial[2]])
    }

    pub fn spatial(&self) -> [f64; 3] {
        [self.0[1], self.0[2], self.0[3]]
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// Errors unless every component is finite.
    pub fn finite(self, what: &'static str) -> Result<Self> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(Error::NonFinite(what))
        }
    }

    /// Largest absolute component.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    pub fn to_vector4(self) -> Vector4<f64> {
        Vector4::from(self.0)
    }

    pub fn from_vector4(v: &Vector4<f64>) -> Self {
        FourVector([v[0], v[1], v[2], v[3]])
    }

    /// Applies a matrix acting on contravariant components.
    pub fn transformed(self, m: &Matrix4<f64>) -> Self {
        Self::from_vector4(&(m * self.to_vector4()))
    }

    pub fn lower(self) -> FourCovector {
        lower(self)
    }
}

impl FourCovector {
    pub fn raise(self) -> FourVector {
        raise(self)
    }

    /// Natural pairing `w_mu v^mu`.
    pub fn pair(&self, v: &FourVector) -> f64 {
        (0..4).map(|i| self.0[i] * v.0[i]).sum()
    }
}

impl Index<usize> for FourVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for FourVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl Add for FourVector {
    type Output = FourVector;
    fn add(self, rhs: FourVector) -> FourVector {
        FourVector(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl AddAssign for FourVector {
    fn add_assign(&mut self, rhs: FourVector) {
        *self = *self + rhs;
    }
}

impl Sub for FourVector {
    type Output = FourVector;
    fn sub(self, rhs: FourVector) -> FourVector {
        FourVector(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

impl SubAssign for FourVector {
    fn sub_assign(&mut self, rhs: FourVector) {
        *self = *self - rhs;
    }
}

impl Neg for FourVector {
    type Output = FourVector;
    fn neg(self) -> FourVector {
        FourVector(self.0.map(|c| -c))
    }
}

impl Mul<f64> for FourVector {
    type Output = FourVector;
    fn mul(self, k: f64) -> FourVector {
        FourVector(self.0.map(|c| c * k))
    }
}

impl Mul<FourVector> for f64 {
    type Output = FourVector;
    fn mul(self, v: FourVector) -> FourVector {
        v * self
    }
}

/// `eta_{mu nu} a^mu b^nu`.
pub fn eta_dot(a: &FourVector, b: &FourVector) -> f64 {
    -a.0[0] * b.0[0] + a.0[1] * b.0[1] + a.0[2] * b.0[2] + a.0[3] * b.0[3]
}

/// `eta(a, a)`.
pub fn eta_sq(a: &FourVector) -> f64 {
    eta_dot(a, a)
}

pub fn lower(a: FourVector) -> FourCovector {
    FourCovector([-a.0[0], a.0[1], a.0[2], a.0[3]])
}

pub fn raise(w: FourCovector) -> FourVector {
    FourVector([-w.0[0], w.0[1], w.0[2], w.0[3]])
}

/// Velocity projector `P(v) = v + eta(u, v) u` for an `eta`-normalized `u`.
///
/// The result is `eta`-orthogonal to `u`; applying it twice changes nothing.
pub fn projector_apply(u: &FourVector, v: &FourVector) -> Result<FourVector> {
    let n = eta_sq(u);
    if (n + 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::Normalization {
            value: n,
            tolerance: NORMALIZATION_TOL,
        });
    }
    Ok(*v + *u * eta_dot(u, v))
}

/// Outer product `a^mu w_nu` as a (1,1) tensor.
pub fn outer(a: &FourVector, w: &FourCovector) -> Matrix4<f64> {
    Matrix4::from_fn(|i, j| a.0[i] * w.0[j])
}
