//! Planar geometry of mixed domains.
//!
//! Points are complex numbers. A [`MixedDomain`] is bounded by two curves
//! sharing their endpoints: γ₁ (reflecting / Neumann) and γ₂ (killing /
//! Dirichlet), one of which is a circular arc. All values are immutable after
//! construction.

mod curve;
mod domain;
mod predicates;
mod spec;
mod symmetrize;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use curve::{Arc, BoundaryCurve, Nearest, NearestKind, Polyline};
pub use domain::{ArcRole, BoundaryPiece, DirichletPart, Location, MixedDomain, SignedDistance};
pub use predicates::{
    is_convex, is_starlike_complement, origin_arc, origin_arc_contained, Convexity, OriginArc, Starlike,
    StarlikeCertificate,
};
pub use spec::{ArcDesignation, DomainSpec};
pub use symmetrize::{symmetrize_domain, SymmetrizedDomain, DEFAULT_CLIP_RADIUS};

/// A point of the plane, `x + iy`.
pub type Point = Complex64;

/// Geometric tolerance used by the sampled predicates.
pub const GEOM_TOL: f64 = 1e-9;

/// Default number of samples per boundary curve.
pub const DEFAULT_SAMPLES: usize = 512;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GeometryError {
    #[error("inversion of the circle center {0} is undefined")]
    SingularInversion(Point),
    #[error("invalid circle: radius {0} must be positive and finite")]
    InvalidRadius(f64),
    #[error("non-finite point {0}")]
    NonFinite(Point),
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("domain has empty interior (area {0:.3e})")]
    EmptyInterior(f64),
    #[error("arc role mismatch: {0}")]
    ArcRoleMismatch(String),
    #[error("unbounded symmetrization: {0}")]
    Unbounded(String),
    #[error("need at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("zero-length half-tangent estimate at {0}")]
    ZeroTangent(Point),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// A circle `∂B(center, radius)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Point,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Point, radius: f64) -> Result<Self, GeometryError> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(GeometryError::InvalidRadius(radius));
        }
        if !(center.re.is_finite() && center.im.is_finite()) {
            return Err(GeometryError::NonFinite(center));
        }
        Ok(Self { center, radius })
    }

    pub fn unit() -> Self {
        Self {
            center: Point::new(0.0, 0.0),
            radius: 1.0,
        }
    }

    /// Circle through three points, `None` when they are (numerically)
    /// collinear.
    pub fn through(a: Point, b: Point, c: Point) -> Option<Self> {
        let ab = b - a;
        let ac = c - a;
        let d = 2.0 * cross(ab, ac);
        let scale = ab.norm().max(ac.norm()).max((c - b).norm());
        if d.abs() <= 1e-12 * scale * scale {
            return None;
        }
        let ab2 = ab.norm_sqr();
        let ac2 = ac.norm_sqr();
        let ux = (ac.im * ab2 - ab.im * ac2) / d;
        let uy = (ab.re * ac2 - ac.re * ab2) / d;
        let offset = Point::new(ux, uy);
        Some(Self {
            center: a + offset,
            radius: offset.norm(),
        })
    }

    pub fn point_at(&self, angle: f64) -> Point {
        self.center + Point::from_polar(self.radius, angle)
    }

    pub fn angle_of(&self, z: Point) -> f64 {
        (z - self.center).arg()
    }

    /// Circle inversion `σ_C(z) = z₀ + R² / conj(z − z₀)`.
    pub fn invert(&self, z: Point) -> Result<Point, GeometryError> {
        let d = z - self.center;
        if d.norm_sqr() == 0.0 || !d.norm_sqr().is_normal() {
            return Err(GeometryError::SingularInversion(z));
        }
        Ok(self.center + self.radius * self.radius / d.conj())
    }

    /// Distance of `z` from the circle itself.
    pub fn distance(&self, z: Point) -> f64 {
        ((z - self.center).norm() - self.radius).abs()
    }
}

/// Reflects `z` in `circle`.
pub fn invert_point(circle: &Circle, z: Point) -> Result<Point, GeometryError> {
    circle.invert(z)
}

pub(crate) fn cross(a: Point, b: Point) -> f64 {
    a.re * b.im - a.im * b.re
}

pub(crate) fn dot(a: Point, b: Point) -> f64 {
    a.re * b.re + a.im * b.im
}

/// Reduces an angle to `[0, 2π)`.
pub(crate) fn wrap_positive(angle: f64) -> f64 {
    let a = angle.rem_euclid(2.0 * PI);
    if a >= 2.0 * PI {
        0.0
    } else {
        a
    }
}

/// Signed area of a closed polygon (positive for counter-clockwise order).
pub(crate) fn signed_area(points: &[Point]) -> f64 {
    let n = points.len();
    (0..n).map(|k| cross(points[k], points[(k + 1) % n])).sum::<f64>() * 0.5
}

/// Ray-casting point-in-polygon test.
pub(crate) fn point_in_polygon(points: &[Point], z: Point) -> bool {
    let n = points.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (points[i], points[j]);
        if (a.im > z.im) != (b.im > z.im) {
            let x = a.re + (z.im - a.im) * (b.re - a.re) / (b.im - a.im);
            if z.re < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}
