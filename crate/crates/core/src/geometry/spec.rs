use serde::{Deserialize, Serialize};

use super::curve::{Arc, BoundaryCurve};
use super::domain::{ArcRole, DirichletPart, MixedDomain};
use super::{GeometryError, Point, GEOM_TOL};

/// Which sampled curve of a `sampled` domain is the circular arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArcDesignation {
    Gamma1,
    Gamma2,
}

/// JSON description of a domain.
///
/// ```json
/// { "kind": "sector", "half_angle": 0.7853981633974483, "dirichlet": "straight" }
/// ```
///
/// Every kind accepts an optional `"rotation"` (radians, default 0) applied
/// about the origin after construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    /// Upper half of the unit disk.
    HalfDisk {
        #[serde(default)]
        dirichlet: DirichletPart,
        #[serde(default)]
        rotation: f64,
    },
    /// Sector of the unit disk symmetric about the positive imaginary axis.
    Sector {
        half_angle: f64,
        #[serde(default)]
        dirichlet: DirichletPart,
        #[serde(default)]
        rotation: f64,
    },
    /// Lens with the reflecting curve on the unit circle.
    ArcGamma1 {
        half_angle: f64,
        corner_angle: f64,
        #[serde(default)]
        rotation: f64,
    },
    /// Lens with the killing curve on the unit circle.
    ArcGamma2 {
        half_angle: f64,
        corner_angle: f64,
        #[serde(default)]
        rotation: f64,
    },
    /// Explicit `[x, y]` samples; the designated curve must be cocircular.
    Sampled {
        gamma1: Vec<[f64; 2]>,
        gamma2: Vec<[f64; 2]>,
        arc: ArcDesignation,
        /// Accept non-convex boundaries (diagnostics only).
        #[serde(default)]
        allow_nonconvex: bool,
        #[serde(default)]
        rotation: f64,
    },
}

impl DomainSpec {
    pub fn build(&self) -> Result<MixedDomain, GeometryError> {
        let (domain, rotation) = match self {
            Self::HalfDisk { dirichlet, rotation } => (MixedDomain::half_disk(*dirichlet), *rotation),
            Self::Sector {
                half_angle,
                dirichlet,
                rotation,
            } => (MixedDomain::sector(*half_angle, *dirichlet)?, *rotation),
            Self::ArcGamma1 {
                half_angle,
                corner_angle,
                rotation,
            } => (
                MixedDomain::lens_reflecting_arc(*half_angle, *corner_angle)?,
                *rotation,
            ),
            Self::ArcGamma2 {
                half_angle,
                corner_angle,
                rotation,
            } => (MixedDomain::lens(*half_angle, *corner_angle)?, *rotation),
            Self::Sampled {
                gamma1,
                gamma2,
                arc,
                allow_nonconvex,
                rotation,
            } => {
                let pts = |v: &[[f64; 2]]| v.iter().map(|p| Point::new(p[0], p[1])).collect();
                let (g1, g2): (Vec<Point>, Vec<Point>) = (pts(gamma1), pts(gamma2));
                let (c1, c2, role) = match arc {
                    ArcDesignation::Gamma1 => (
                        cocircular(&g1)?,
                        BoundaryCurve::polyline(g2)?,
                        ArcRole::Gamma1IsArc,
                    ),
                    ArcDesignation::Gamma2 => (
                        BoundaryCurve::polyline(g1)?,
                        cocircular(&g2)?,
                        ArcRole::Gamma2IsArc,
                    ),
                };
                let d = if *allow_nonconvex {
                    MixedDomain::new_nonconvex(c1, c2, role)?
                } else {
                    MixedDomain::new(c1, c2, role)?
                };
                (d, *rotation)
            }
        };
        if rotation == 0.0 {
            Ok(domain)
        } else {
            domain.rotated(rotation)
        }
    }
}

/// Fits the arc through the first, middle and last sample and checks that
/// every sample lies on it.
fn cocircular(points: &[Point]) -> Result<BoundaryCurve, GeometryError> {
    if points.len() < 3 {
        return Err(GeometryError::TooFewPoints(points.len()));
    }
    let arc = Arc::through(points[0], points[points.len() / 2], points[points.len() - 1])
        .map_err(|e| GeometryError::ArcRoleMismatch(format!("designated arc: {e}")))?;
    let circle = arc.circle();
    let tol = GEOM_TOL.max(1e-9 * circle.radius);
    if let Some(p) = points.iter().find(|p| circle.distance(**p) > tol) {
        return Err(GeometryError::ArcRoleMismatch(format!(
            "sample {p} is {:.3e} off the fitted circle",
            circle.distance(*p)
        )));
    }
    Ok(BoundaryCurve::arc(arc))
}
