use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::domain::{ArcRole, BoundaryPiece, Location, MixedDomain};
use super::{cross, Circle, GeometryError, Point, GEOM_TOL};

/// Outcome of the sampled convexity test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Convexity {
    Convex,
    /// The vertex triple `(prev, vertex, next)` turning the wrong way.
    NotConvex {
        witness: [Point; 3],
    },
}

impl Convexity {
    pub fn is_convex(&self) -> bool {
        matches!(self, Convexity::Convex)
    }
}

/// Tests whether a closed sampled curve bounds a convex region.
///
/// Cross products of consecutive edges must share the orientation sign up
/// to `tol · scale²` (scale = bounding-box diagonal), and the total turning
/// must be one full turn. Zero-length edges are skipped.
pub fn is_convex(boundary: &[Point], tol: f64) -> Result<Convexity, GeometryError> {
    let mut pts: Vec<Point> = Vec::with_capacity(boundary.len());
    for &p in boundary {
        if pts.last().is_none_or(|&q: &Point| (p - q).norm() > 0.0) {
            pts.push(p);
        }
    }
    while pts.len() > 1 && (pts[0] - pts[pts.len() - 1]).norm() == 0.0 {
        pts.pop();
    }
    let n = pts.len();
    if n < 3 {
        return Err(GeometryError::TooFewPoints(n));
    }
    let (mut lo, mut hi) = (pts[0], pts[0]);
    for p in &pts {
        lo = Point::new(lo.re.min(p.re), lo.im.min(p.im));
        hi = Point::new(hi.re.max(p.re), hi.im.max(p.im));
    }
    let scale = (hi - lo).norm();
    let eps = tol * scale * scale;
    let orientation = super::signed_area(&pts).signum();
    let mut turning = 0.0;
    for k in 0..n {
        let a = pts[(k + n - 1) % n];
        let b = pts[k];
        let c = pts[(k + 1) % n];
        let e1 = b - a;
        let e2 = c - b;
        if cross(e1, e2) * orientation < -eps {
            return Ok(Convexity::NotConvex { witness: [a, b, c] });
        }
        turning += (e2 / e1).arg();
    }
    if (turning.abs() - 2.0 * PI).abs() > 1e-6 {
        return Ok(Convexity::NotConvex {
            witness: [pts[n - 1], pts[0], pts[1]],
        });
    }
    Ok(Convexity::Convex)
}

/// Evidence that `U∖D` was checked to be starlike about the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StarlikeCertificate {
    pub grid_points: usize,
    pub pairs_checked: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Starlike {
    Yes(StarlikeCertificate),
    /// `z ∈ U∖D` but `t·z ∈ D`.
    No {
        z: Point,
        t: f64,
    },
}

impl Starlike {
    pub fn holds(&self) -> bool {
        matches!(self, Starlike::Yes(_))
    }
}

const STARLIKE_RADII: usize = 96;
const STARLIKE_ANGLES: usize = 384;

/// Grid test of starlikeness of `U∖D` with respect to the origin, for
/// `t ∈ {0.1, …, 0.9}`.
pub fn is_starlike_complement(domain: &MixedDomain) -> Result<Starlike, GeometryError> {
    if domain.arc_role() != ArcRole::Gamma1IsArc {
        return Err(GeometryError::ArcRoleMismatch(
            "starlike test needs γ₁ to be the arc".to_string(),
        ));
    }
    let circle = domain.arc().circle();
    if circle.center.norm() > GEOM_TOL || (circle.radius - 1.0).abs() > GEOM_TOL {
        return Err(GeometryError::Precondition(format!(
            "γ₁ must lie on the unit circle, got center {} radius {}",
            circle.center, circle.radius
        )));
    }
    if let Some(p) = domain.polygon().iter().find(|p| p.norm() > 1.0 + GEOM_TOL) {
        return Err(GeometryError::Precondition(format!(
            "domain leaves the closed unit disk at {p}"
        )));
    }
    let tol = domain.tol();
    let mut grid_points = 0;
    let mut pairs_checked = 0;
    for j in 0..STARLIKE_RADII {
        let r = (j as f64 + 0.5) / STARLIKE_RADII as f64;
        for k in 0..STARLIKE_ANGLES {
            let z = Point::from_polar(r, 2.0 * PI * k as f64 / STARLIKE_ANGLES as f64);
            if domain.signed_distance(z).value < -tol {
                continue;
            }
            grid_points += 1;
            for step in 1..=9 {
                let t = step as f64 / 10.0;
                pairs_checked += 1;
                if domain.signed_distance(t * z).value < -tol {
                    return Ok(Starlike::No { z, t });
                }
            }
        }
    }
    Ok(Starlike::Yes(StarlikeCertificate {
        grid_points,
        pairs_checked,
    }))
}

/// Result of walking the arc of `C(0, z₁, z₂)` between `z₁` and `z₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum OriginArc {
    Contained,
    /// The arc leaves `D ∪ γ₂` through γ₁: the condition fails.
    Leaves {
        at: Point,
    },
    /// The arc meets γ₂ before `z₂`, so the pair is outside the scope of
    /// the condition.
    MeetsGamma2 {
        at: Point,
    },
}

impl OriginArc {
    /// True unless the condition is violated.
    pub fn holds(&self) -> bool {
        !matches!(self, OriginArc::Leaves { .. })
    }
}

const ORIGIN_ARC_SAMPLES: usize = 256;

/// Walks the arc from `z1` to `z2` of the circle through `z1`, `z2` and the
/// center of the domain's arc, on the side not containing that center.
/// Collinear inputs walk the segment `[z1, z2]`.
pub fn origin_arc(domain: &MixedDomain, z1: Point, z2: Point) -> Result<OriginArc, GeometryError> {
    let origin = domain.arc().circle().center;
    if domain.contains(z1) != Location::Interior {
        return Err(GeometryError::Precondition(format!("z1 = {z1} is not interior")));
    }
    if !admissible(domain, z2) {
        return Err(GeometryError::Precondition(format!("z2 = {z2} is not in D ∪ γ₂")));
    }
    let path: Box<dyn Fn(f64) -> Point> = match Circle::through(origin, z1, z2) {
        None => Box::new(move |s| z1 + (z2 - z1) * s),
        Some(c) => {
            let a1 = c.angle_of(z1);
            let a2 = c.angle_of(z2);
            let ao = c.angle_of(origin);
            let ccw = (a2 - a1).rem_euclid(2.0 * PI);
            let o_rel = (ao - a1).rem_euclid(2.0 * PI);
            let sweep = if o_rel < ccw { ccw - 2.0 * PI } else { ccw };
            Box::new(move |s| c.point_at(a1 + sweep * s))
        }
    };
    let tol = domain.tol();
    let on_gamma2 = |w: Point| domain.gamma2().distance(w) <= tol;
    for k in 1..=ORIGIN_ARC_SAMPLES {
        let s = k as f64 / ORIGIN_ARC_SAMPLES as f64;
        let w = path(s);
        if !admissible(domain, w) {
            // locate the exit point between the last admissible sample and w
            let (mut a, mut b) = ((k - 1) as f64 / ORIGIN_ARC_SAMPLES as f64, s);
            for _ in 0..60 {
                let m = 0.5 * (a + b);
                if admissible(domain, path(m)) {
                    a = m;
                } else {
                    b = m;
                }
            }
            let exit = path(a);
            return Ok(if on_gamma2(exit) {
                OriginArc::MeetsGamma2 { at: exit }
            } else {
                OriginArc::Leaves { at: w }
            });
        }
        if k < ORIGIN_ARC_SAMPLES && on_gamma2(w) {
            return Ok(OriginArc::MeetsGamma2 { at: w });
        }
    }
    Ok(OriginArc::Contained)
}

pub fn origin_arc_contained(domain: &MixedDomain, z1: Point, z2: Point) -> bool {
    matches!(origin_arc(domain, z1, z2), Ok(OriginArc::Contained))
}

/// Membership in `D ∪ γ₂` with the domain's boundary band.
fn admissible(domain: &MixedDomain, w: Point) -> bool {
    let sd = domain.signed_distance(w);
    let tol = domain.tol();
    if sd.value < -tol {
        return true;
    }
    if sd.value.abs() > tol {
        return false;
    }
    sd.piece == BoundaryPiece::Gamma2 || domain.gamma2().distance(w) <= tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DirichletPart;

    #[test]
    fn square_is_convex_and_l_shape_is_not() {
        let square = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ];
        assert_eq!(is_convex(&square, 1e-9).unwrap(), Convexity::Convex);
        let l_shape = [
            Point::new(0.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(2.0, 1.0),
            Point::new(1.0, 1.0),
            Point::new(1.0, 2.0),
            Point::new(0.0, 2.0),
        ];
        match is_convex(&l_shape, 1e-9).unwrap() {
            Convexity::NotConvex { witness } => assert_eq!(witness[1], Point::new(1.0, 1.0)),
            Convexity::Convex => panic!("L shape reported convex"),
        }
        assert!(matches!(
            is_convex(&square[..2], 1e-9),
            Err(GeometryError::TooFewPoints(2))
        ));
    }

    #[test]
    fn doubly_wound_polygon_is_rejected() {
        let star: Vec<Point> = (0..5)
            .map(|k| Point::from_polar(1.0, 4.0 * PI * k as f64 / 5.0))
            .collect();
        assert!(!is_convex(&star, 1e-9).unwrap().is_convex());
    }

    #[test]
    fn starlike_examples() {
        let half = MixedDomain::half_disk(DirichletPart::Straight);
        assert!(is_starlike_complement(&half).unwrap().holds());
        let sector = MixedDomain::sector(PI / 4.0, DirichletPart::Straight).unwrap();
        assert!(is_starlike_complement(&sector).unwrap().holds());
        let swapped = MixedDomain::half_disk(DirichletPart::Arc);
        assert!(is_starlike_complement(&swapped).is_err());
    }

    #[test]
    fn origin_arc_in_lower_half_disk() {
        let d = MixedDomain::half_disk(DirichletPart::Arc).rotated(PI).unwrap();
        assert!(origin_arc_contained(
            &d,
            Point::new(-0.3, -0.3),
            Point::new(0.3, -0.3)
        ));
        // collinear with the origin: the segment
        assert!(origin_arc_contained(
            &d,
            Point::new(0.0, -0.2),
            Point::new(0.0, -0.9)
        ));
        // endpoint on γ₂
        let z2 = Point::from_polar(1.0, -PI / 3.0);
        assert!(origin_arc_contained(&d, Point::new(-0.2, -0.5), z2));
    }

    #[test]
    fn arcs_through_gamma2_are_out_of_scope() {
        let d = MixedDomain::half_disk(DirichletPart::Arc).rotated(PI).unwrap();
        // the circle through 0 and these points bulges below the unit circle
        let r = origin_arc(&d, Point::new(-0.1, -0.01), Point::new(0.1, -0.01)).unwrap();
        assert!(matches!(r, OriginArc::MeetsGamma2 { .. }), "{r:?}");
        assert!(r.holds());
        assert!(!origin_arc_contained(
            &d,
            Point::new(-0.1, -0.01),
            Point::new(0.1, -0.01)
        ));
    }

    #[test]
    fn origin_arc_rejects_points_off_the_domain() {
        let d = MixedDomain::half_disk(DirichletPart::Arc).rotated(PI).unwrap();
        assert!(!origin_arc_contained(
            &d,
            Point::new(0.0, 0.5),
            Point::new(0.3, -0.3)
        ));
        let err = origin_arc(&d, Point::new(0.0, -0.5), Point::new(0.0, 0.5)).unwrap_err();
        assert!(matches!(err, GeometryError::Precondition(_)));
    }
}
