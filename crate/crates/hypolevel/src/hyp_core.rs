//! Geometry of the Poincaré disk: points, automorphisms, distances.

use num_complex::Complex64;
use thiserror::Error;

use crate::map_dsl::{EvalError, MapExpr};

/// Points with |z| >= 1 - EPS_BOUNDARY are rejected so that 1/(1-|z|^2)
/// stays finite. Boundary angles live in [`BoundaryPoint`].
pub const EPS_BOUNDARY: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum PointError {
    #[error("point with modulus {0} is not strictly inside the unit disk")]
    NotInDisk(f64),
}

/// A point of the open unit disk, |z| < 1 - EPS_BOUNDARY.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskPoint(Complex64);

impl DiskPoint {
    pub fn new(z: Complex64) -> Result<Self, PointError> {
        let r = z.norm();
        if r >= 1.0 - EPS_BOUNDARY {
            Err(PointError::NotInDisk(r))
        } else {
            Ok(DiskPoint(z))
        }
    }

    pub fn from_re_im(re: f64, im: f64) -> Result<Self, PointError> {
        Self::new(Complex64::new(re, im))
    }

    pub fn origin() -> Self {
        DiskPoint(Complex64::new(0.0, 0.0))
    }

    /// Clamps the modulus to the permitted range. Used for results of exact
    /// disk-preserving maps whose floating-point image may graze the cutoff.
    pub fn clamped(z: Complex64) -> Self {
        let r = z.norm();
        let max = 1.0 - EPS_BOUNDARY - f64::EPSILON;
        if r > max {
            DiskPoint(z * (max / r))
        } else {
            DiskPoint(z)
        }
    }

    pub fn value(self) -> Complex64 {
        self.0
    }
}

/// A point of the unit circle, stored by its angle so |value| = 1 exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub angle: f64,
}

impl BoundaryPoint {
    pub fn new(angle: f64) -> Self {
        BoundaryPoint { angle }
    }

    pub fn value(self) -> Complex64 {
        Complex64::from_polar(1.0, self.angle)
    }
}

/// Disk automorphism in the canonical chart T(z) = e^{i theta} (z - a)/(1 - conj(a) z).
///
/// `a` is the point sent to the origin; `theta` is the post-rotation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoebiusAutomorphism {
    pub a: Complex64,
    pub theta: f64,
}

impl MoebiusAutomorphism {
    pub fn new(a: Complex64, theta: f64) -> Result<Self, PointError> {
        if a.norm() >= 1.0 {
            return Err(PointError::NotInDisk(a.norm()));
        }
        Ok(MoebiusAutomorphism { a, theta })
    }

    pub fn identity() -> Self {
        MoebiusAutomorphism { a: Complex64::new(0.0, 0.0), theta: 0.0 }
    }

    /// Raw complex-to-complex action, without disk clamping.
    pub fn apply_raw(&self, z: Complex64) -> Complex64 {
        let num = z - self.a;
        let den = Complex64::new(1.0, 0.0) - self.a.conj() * z;
        Complex64::from_polar(1.0, self.theta) * num / den
    }

    pub fn apply(&self, z: DiskPoint) -> DiskPoint {
        DiskPoint::clamped(self.apply_raw(z.value()))
    }

    /// Derivative T'(z) = e^{i theta} (1 - |a|^2) / (1 - conj(a) z)^2.
    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let den = Complex64::new(1.0, 0.0) - self.a.conj() * z;
        Complex64::from_polar(1.0, self.theta) * (1.0 - self.a.norm_sqr()) / (den * den)
    }

    pub fn inverse(&self) -> Self {
        // T^{-1}(w) = (e^{-i theta} w + a)/(1 + conj(a) e^{-i theta} w)
        // maps w = -e^{i theta} a = T(0) to 0.
        let a_inv = -Complex64::from_polar(1.0, self.theta) * self.a;
        MoebiusAutomorphism { a: a_inv, theta: -self.theta }
    }

    /// self ∘ other, renormalized back to the (a, theta) chart.
    pub fn compose(&self, other: &Self) -> Self {
        // Matrix form of e^{it}(z-a)/(1-conj(a)z): [[e^{it}, -e^{it} a], [-conj(a), 1]].
        let (e1, e2) = (
            Complex64::from_polar(1.0, self.theta),
            Complex64::from_polar(1.0, other.theta),
        );
        let (a11, a12, a21, a22) = (e1, -e1 * self.a, -self.a.conj(), Complex64::new(1.0, 0.0));
        let (b11, b12, b21, b22) = (e2, -e2 * other.a, -other.a.conj(), Complex64::new(1.0, 0.0));
        let m11 = a11 * b11 + a12 * b21;
        let m12 = a11 * b12 + a12 * b22;
        let m22 = a21 * b12 + a22 * b22;
        // Canonical parameters: a = -m12/m11 (the zero of the map), phase from m11/m22.
        let a = -m12 / m11;
        let theta = (m11 / m22).arg();
        MoebiusAutomorphism { a, theta }
    }
}

/// Pseudo-hyperbolic distance |(z - w)/(1 - conj(w) z)| in [0, 1).
pub fn pseudo_hyp_distance(z: DiskPoint, w: DiskPoint) -> f64 {
    let (z, w) = (z.value(), w.value());
    let num = z - w;
    let den = Complex64::new(1.0, 0.0) - w.conj() * z;
    num.norm() / den.norm()
}

/// Poincaré distance log((1 + rho)/(1 - rho)).
pub fn hyp_distance(z: DiskPoint, w: DiskPoint) -> f64 {
    let rho = pseudo_hyp_distance(z, w);
    ((1.0 + rho) / (1.0 - rho)).ln()
}

/// Hyperbolic density 2/(1 - |z|^2).
pub fn hyp_density(z: DiskPoint) -> f64 {
    2.0 / (1.0 - z.value().norm_sqr())
}

/// Density quotient (1 - |f(z)|^2)/(1 - |z|^2). By Schwarz-Pick it dominates |f'(z)|.
pub fn nu_f(f: &MapExpr, z: DiskPoint) -> Result<f64, EvalError> {
    let fz = f.eval_value(z.value())?;
    Ok((1.0 - fz.norm_sqr()) / (1.0 - z.value().norm_sqr()))
}
