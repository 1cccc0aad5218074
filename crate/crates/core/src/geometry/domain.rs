use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::curve::{Arc, BoundaryCurve, Nearest, NearestKind};
use super::predicates::{is_convex, Convexity};
use super::{cross, dot, signed_area, Circle, GeometryError, Point, DEFAULT_SAMPLES, GEOM_TOL};

/// Which of the two boundary curves is the circular arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArcRole {
    Gamma1IsArc,
    Gamma2IsArc,
}

/// Which boundary curve carries the killing condition in the catalog
/// constructors: the straight piece (diameter or radii) or the arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirichletPart {
    #[default]
    Straight,
    Arc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Location {
    Interior,
    OnGamma1,
    OnGamma2,
    Outside,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryPiece {
    Gamma1,
    Gamma2,
}

/// Signed distance to the boundary, negative inside the domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedDistance {
    pub value: f64,
    pub piece: BoundaryPiece,
    pub nearest: Point,
    /// Outward unit normal when the nearest point is a smooth boundary point.
    pub normal: Option<Point>,
}

/// A planar domain bounded by a reflecting curve γ₁ and a killing curve γ₂
/// with `γ₁(0) = γ₂(0)` and `γ₁(1) = γ₂(1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedDomain {
    gamma1: BoundaryCurve,
    gamma2: BoundaryCurve,
    arc_role: ArcRole,
    tol: f64,
    orientation: f64,
    convex: bool,
    polygon: Vec<Point>,
    area: f64,
    diameter: f64,
}

impl MixedDomain {
    /// Builds a convex mixed domain, validating every structural invariant.
    pub fn new(
        gamma1: BoundaryCurve,
        gamma2: BoundaryCurve,
        arc_role: ArcRole,
    ) -> Result<Self, GeometryError> {
        Self::build(gamma1, gamma2, arc_role, true)
    }

    /// Like [`MixedDomain::new`] but accepts non-convex boundaries, for
    /// diagnostics of the predicates on counterexamples.
    pub fn new_nonconvex(
        gamma1: BoundaryCurve,
        gamma2: BoundaryCurve,
        arc_role: ArcRole,
    ) -> Result<Self, GeometryError> {
        Self::build(gamma1, gamma2, arc_role, false)
    }

    fn build(
        gamma1: BoundaryCurve,
        gamma2: BoundaryCurve,
        arc_role: ArcRole,
        require_convex: bool,
    ) -> Result<Self, GeometryError> {
        let designated = match arc_role {
            ArcRole::Gamma1IsArc => &gamma1,
            ArcRole::Gamma2IsArc => &gamma2,
        };
        if designated.as_arc().is_none() {
            return Err(GeometryError::ArcRoleMismatch(format!(
                "{arc_role:?} but that curve is sampled"
            )));
        }
        let scale = (gamma1.start() - gamma1.end())
            .norm()
            .max(gamma1.length())
            .max(gamma2.length());
        let tol = GEOM_TOL * scale.max(1.0);
        if (gamma1.start() - gamma2.start()).norm() > tol || (gamma1.end() - gamma2.end()).norm() > tol {
            return Err(GeometryError::InvalidDomain(format!(
                "curves do not share endpoints: γ₁ {}→{}, γ₂ {}→{}",
                gamma1.start(),
                gamma1.end(),
                gamma2.start(),
                gamma2.end()
            )));
        }
        let polygon = closed_loop(&gamma1, &gamma2, DEFAULT_SAMPLES);
        let signed = signed_area(&polygon);
        if signed.abs() <= 1e-10 * scale * scale {
            return Err(GeometryError::EmptyInterior(signed.abs()));
        }
        if let Some((i, j)) = first_self_intersection(&polygon) {
            return Err(GeometryError::InvalidDomain(format!(
                "boundary is not simple: edges {i} and {j} cross"
            )));
        }
        let convex = matches!(is_convex(&polygon, GEOM_TOL)?, Convexity::Convex);
        if require_convex && !convex {
            return Err(GeometryError::InvalidDomain(
                "boundary does not enclose a convex region".to_string(),
            ));
        }
        let diameter = polygon
            .iter()
            .flat_map(|a| polygon.iter().map(move |b| (a - b).norm()))
            .fold(0.0, f64::max);
        Ok(Self {
            gamma1,
            gamma2,
            arc_role,
            tol,
            orientation: signed.signum(),
            convex,
            polygon,
            area: signed.abs(),
            diameter,
        })
    }

    /// Upper half of the unit disk. `Straight` puts the killing condition on
    /// the diameter (γ₁ = the arc); `Arc` kills on the semicircle.
    /// Corners are `1` (t = 0) and `−1` (t = 1).
    pub fn half_disk(dirichlet: DirichletPart) -> Self {
        let arc = BoundaryCurve::arc(Arc::new(Circle::unit(), 0.0, PI).unwrap());
        let diameter = BoundaryCurve::segment(Point::new(1.0, 0.0), Point::new(-1.0, 0.0)).unwrap();
        match dirichlet {
            DirichletPart::Straight => Self::new(arc, diameter, ArcRole::Gamma1IsArc),
            DirichletPart::Arc => Self::new(diameter, arc, ArcRole::Gamma2IsArc),
        }
        .expect("half disk is a valid mixed domain")
    }

    /// Sector `{|z| < 1, |arg z − π/2| < half_angle}` of the unit disk.
    pub fn sector(half_angle: f64, dirichlet: DirichletPart) -> Result<Self, GeometryError> {
        if !(half_angle > 0.0 && half_angle <= FRAC_PI_2) {
            return Err(GeometryError::InvalidDomain(format!(
                "sector half angle {half_angle} outside (0, π/2]"
            )));
        }
        let c0 = Point::from_polar(1.0, FRAC_PI_2 - half_angle);
        let c1 = Point::from_polar(1.0, FRAC_PI_2 + half_angle);
        let arc = BoundaryCurve::arc(Arc::new(
            Circle::unit(),
            FRAC_PI_2 - half_angle,
            2.0 * half_angle,
        )?);
        let radii = BoundaryCurve::polyline(vec![c0, Point::new(0.0, 0.0), c1])?;
        match dirichlet {
            DirichletPart::Straight => Self::new(arc, radii, ArcRole::Gamma1IsArc),
            DirichletPart::Arc => Self::new(radii, arc, ArcRole::Gamma2IsArc),
        }
    }

    /// Lens `U ∩ B(−is, ρ)` whose lower boundary γ₂ is the arc of the unit
    /// circle between `exp(i(−π/2 ∓ half_angle))` and whose upper boundary γ₁
    /// meets it at interior angle `corner_angle`.
    pub fn lens(half_angle: f64, corner_angle: f64) -> Result<Self, GeometryError> {
        let (lower, upper) = lens_arcs(half_angle, corner_angle)?;
        Self::new(upper, lower, ArcRole::Gamma2IsArc)
    }

    /// The lens rotated by π with roles exchanged: γ₁ is the arc of the unit
    /// circle (reflecting) and γ₂ the other arc (killing).
    pub fn lens_reflecting_arc(half_angle: f64, corner_angle: f64) -> Result<Self, GeometryError> {
        let (lower, upper) = lens_arcs(half_angle, corner_angle)?;
        Self::new(lower.rotated(PI), upper.rotated(PI), ArcRole::Gamma1IsArc)
    }

    pub fn rotated(&self, angle: f64) -> Result<Self, GeometryError> {
        Self::build(
            self.gamma1.rotated(angle),
            self.gamma2.rotated(angle),
            self.arc_role,
            self.convex,
        )
    }

    pub fn gamma1(&self) -> &BoundaryCurve {
        &self.gamma1
    }

    pub fn gamma2(&self) -> &BoundaryCurve {
        &self.gamma2
    }

    pub fn curve(&self, piece: BoundaryPiece) -> &BoundaryCurve {
        match piece {
            BoundaryPiece::Gamma1 => &self.gamma1,
            BoundaryPiece::Gamma2 => &self.gamma2,
        }
    }

    pub fn arc_role(&self) -> ArcRole {
        self.arc_role
    }

    /// The designated circular arc.
    pub fn arc(&self) -> &Arc {
        match self.arc_role {
            ArcRole::Gamma1IsArc => self.gamma1.as_arc(),
            ArcRole::Gamma2IsArc => self.gamma2.as_arc(),
        }
        .expect("validated at construction")
    }

    pub fn corner0(&self) -> Point {
        self.gamma1.start()
    }

    pub fn corner1(&self) -> Point {
        self.gamma1.end()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn is_convex(&self) -> bool {
        self.convex
    }

    /// +1 when γ₁ followed by reversed γ₂ runs counter-clockwise.
    pub fn orientation(&self) -> f64 {
        self.orientation
    }

    /// Dense closed boundary: γ₁ forward, then γ₂ backward.
    pub fn polygon(&self) -> &[Point] {
        &self.polygon
    }

    pub fn closed_boundary(&self, samples_per_curve: usize) -> Vec<Point> {
        closed_loop(&self.gamma1, &self.gamma2, samples_per_curve)
    }

    pub fn signed_distance(&self, z: Point) -> SignedDistance {
        let n1 = self.gamma1.nearest(z);
        let n2 = self.gamma2.nearest(z);
        let pick_first = n1.distance < n2.distance
            || (n1.distance == n2.distance && matches!(n1.kind, NearestKind::Smooth { .. }));
        let (piece, near) = if pick_first {
            (BoundaryPiece::Gamma1, n1)
        } else {
            (BoundaryPiece::Gamma2, n2)
        };
        let (outside, normal) = self.side(piece, &near, z);
        SignedDistance {
            value: if outside { near.distance } else { -near.distance },
            piece,
            nearest: near.point,
            normal,
        }
    }

    /// Decides on which side of the nearest boundary point `z` lies.
    fn side(&self, piece: BoundaryPiece, near: &Nearest, z: Point) -> (bool, Option<Point>) {
        let o = self.orientation;
        let dir = match piece {
            BoundaryPiece::Gamma1 => 1.0,
            BoundaryPiece::Gamma2 => -1.0,
        };
        let outward = |tau: Point| Point::new(0.0, -o) * tau;
        let offset = z - near.point;
        match near.kind {
            NearestKind::Smooth { tangent } => {
                let n = outward(tangent * dir);
                (dot(offset, n) > 0.0, Some(n))
            }
            NearestKind::Vertex { incoming, outgoing } => {
                let (tin, tout) = if dir > 0.0 {
                    (incoming, outgoing)
                } else {
                    (-outgoing, -incoming)
                };
                (self.vertex_side(tin, tout, offset), None)
            }
            NearestKind::Start { .. } => {
                let tin = -self.gamma2.start_half_tangent().unwrap_or(Point::new(0.0, 0.0));
                let tout = self.gamma1.start_half_tangent().unwrap_or(Point::new(0.0, 0.0));
                (self.vertex_side(tin, tout, offset), None)
            }
            NearestKind::End { .. } => {
                let tin = -self.gamma1.end_half_tangent().unwrap_or(Point::new(0.0, 0.0));
                let tout = self.gamma2.end_half_tangent().unwrap_or(Point::new(0.0, 0.0));
                (self.vertex_side(tin, tout, offset), None)
            }
        }
    }

    fn vertex_side(&self, tin: Point, tout: Point, offset: Point) -> bool {
        let o = self.orientation;
        let turn = cross(tin, tout) * o;
        if turn.abs() <= 1e-12 {
            dot(offset, Point::new(0.0, -o) * tin) > 0.0
        } else {
            turn > 0.0
        }
    }

    /// Classifies `z` with a boundary band of width `tol`.
    pub fn contains(&self, z: Point) -> Location {
        let sd = self.signed_distance(z);
        if sd.value.abs() <= self.tol {
            match sd.piece {
                BoundaryPiece::Gamma1 => Location::OnGamma1,
                BoundaryPiece::Gamma2 => Location::OnGamma2,
            }
        } else if sd.value < 0.0 {
            Location::Interior
        } else {
            Location::Outside
        }
    }

    /// Angles between the half-tangents of γ₁ and γ₂ at the two corners.
    pub fn corner_angles(&self) -> Result<(f64, f64), GeometryError> {
        let angle = |a: Point, b: Point| dot(a, b).clamp(-1.0, 1.0).acos();
        let a0 = angle(
            self.gamma1.start_half_tangent()?,
            self.gamma2.start_half_tangent()?,
        );
        let a1 = angle(self.gamma1.end_half_tangent()?, self.gamma2.end_half_tangent()?);
        Ok((a0, a1))
    }

    /// True when both corner angles are at most `π/2 + tol`.
    pub fn satisfies_angle_hypothesis(&self, tol: f64) -> Result<bool, GeometryError> {
        let (a0, a1) = self.corner_angles()?;
        Ok(a0 <= FRAC_PI_2 + tol && a1 <= FRAC_PI_2 + tol)
    }

    /// Bounding box `(min, max)` of the boundary.
    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.polygon {
            lo.re = lo.re.min(p.re);
            lo.im = lo.im.min(p.im);
            hi.re = hi.re.max(p.re);
            hi.im = hi.im.max(p.im);
        }
        (lo, hi)
    }
}

fn lens_arcs(half_angle: f64, corner_angle: f64) -> Result<(BoundaryCurve, BoundaryCurve), GeometryError> {
    let a = half_angle;
    let beta = corner_angle;
    if !(a > 0.0 && a < FRAC_PI_2) || !(beta > a && beta <= FRAC_PI_2) {
        return Err(GeometryError::InvalidDomain(format!(
            "lens needs 0 < half_angle < π/2 and half_angle < corner_angle ≤ π/2, got ({a}, {beta})"
        )));
    }
    // Second circle centered at −is with radius ρ: the angle between the two
    // radii at a corner is π − β and the corner lies on both circles.
    let (ca, sa2) = (a.cos(), a.sin().powi(2));
    let cb = beta.cos();
    let qa = ca * ca - cb * cb;
    let qb = 2.0 * cb * sa2;
    let rho = (qb + (qb * qb + 4.0 * qa * sa2).sqrt()) / (2.0 * qa);
    let s = (1.0 + rho * cb) / ca;
    let c0 = Point::from_polar(1.0, -FRAC_PI_2 - a);
    let c1 = Point::from_polar(1.0, -FRAC_PI_2 + a);
    let lower = BoundaryCurve::arc(Arc::new(Circle::unit(), -FRAC_PI_2 - a, 2.0 * a)?);
    let upper = BoundaryCurve::arc(Arc::through(c0, Point::new(0.0, rho - s), c1)?);
    Ok((lower, upper))
}

fn closed_loop(gamma1: &BoundaryCurve, gamma2: &BoundaryCurve, n: usize) -> Vec<Point> {
    let mut pts = gamma1.samples(n);
    let mut back = gamma2.samples(n);
    back.reverse();
    pts.extend_from_slice(&back[1..back.len() - 1]);
    pts
}

fn first_self_intersection(polygon: &[Point]) -> Option<(usize, usize)> {
    let n = polygon.len();
    let seg = |k: usize| (polygon[k], polygon[(k + 1) % n]);
    for i in 0..n {
        let (a, b) = seg(i);
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (c, d) = seg(j);
            let d1 = cross(b - a, c - a);
            let d2 = cross(b - a, d - a);
            if d1 * d2 >= 0.0 {
                continue;
            }
            let d3 = cross(d - c, a - c);
            let d4 = cross(d - c, b - c);
            if d3 * d4 < 0.0 {
                return Some((i, j));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_3;

    fn lower_half_disk() -> MixedDomain {
        MixedDomain::half_disk(DirichletPart::Arc).rotated(PI).unwrap()
    }

    #[test]
    fn contains_examples_on_lower_half_disk() {
        let d = lower_half_disk();
        assert_eq!(d.contains(Point::new(0.0, -0.5)), Location::Interior);
        assert_eq!(d.contains(Point::new(0.0, 0.0)), Location::OnGamma1);
        assert_eq!(d.contains(Point::new(2.0, 0.0)), Location::Outside);
        assert_eq!(d.contains(Point::new(0.0, -1.0)), Location::OnGamma2);
        assert_eq!(d.contains(Point::new(0.0, 0.3)), Location::Outside);
    }

    #[test]
    fn signed_distance_matches_geometry() {
        let d = MixedDomain::half_disk(DirichletPart::Straight);
        let sd = d.signed_distance(Point::new(0.2, 0.5));
        assert!((sd.value + 1.0 - 0.29f64.sqrt()).abs() < 1e-12);
        assert_eq!(sd.piece, BoundaryPiece::Gamma1);
        let sd = d.signed_distance(Point::new(0.2, 0.1));
        assert!((sd.value + 0.1).abs() < 1e-12);
        assert_eq!(sd.piece, BoundaryPiece::Gamma2);
        let sd = d.signed_distance(Point::new(0.0, 1.5));
        assert!((sd.value - 0.5).abs() < 1e-12);
        // beyond a corner
        let sd = d.signed_distance(Point::new(1.3, -0.2));
        assert!(sd.value > 0.0);
    }

    #[test]
    fn sector_apex_is_handled_as_convex_vertex() {
        let d = MixedDomain::sector(PI / 4.0, DirichletPart::Straight).unwrap();
        assert_eq!(d.contains(Point::new(0.0, -0.1)), Location::Outside);
        assert_eq!(d.contains(Point::new(0.0, 0.1)), Location::Interior);
        assert_eq!(d.contains(Point::new(0.0, 0.0)), Location::OnGamma2);
        assert_eq!(d.contains(Point::new(0.5, 0.2)), Location::Outside);
    }

    #[test]
    fn corner_angles_of_catalog_domains() {
        let (a0, a1) = MixedDomain::half_disk(DirichletPart::Straight)
            .corner_angles()
            .unwrap();
        assert!((a0 - FRAC_PI_2).abs() < 1e-6 && (a1 - FRAC_PI_2).abs() < 1e-6);
        let (a0, a1) = MixedDomain::sector(PI / 4.0, DirichletPart::Straight)
            .unwrap()
            .corner_angles()
            .unwrap();
        assert!((a0 - FRAC_PI_2).abs() < 1e-6 && (a1 - FRAC_PI_2).abs() < 1e-6);
    }

    #[test]
    fn symmetric_lens_has_the_constructed_angle() {
        // Both arcs of the symmetric π/3 lens are unit circles.
        let d = MixedDomain::lens(PI / 6.0, FRAC_PI_3).unwrap();
        let upper = d.gamma1().as_arc().unwrap().circle();
        assert!((upper.radius - 1.0).abs() < 1e-12);
        assert!((upper.center - Point::new(0.0, -3f64.sqrt())).norm() < 1e-12);
        let (a0, a1) = d.corner_angles().unwrap();
        assert!((a0 - FRAC_PI_3).abs() < 1e-9, "{a0}");
        assert!((a1 - FRAC_PI_3).abs() < 1e-9, "{a1}");
    }

    #[test]
    fn orthogonal_lens_radius_is_tan() {
        let d = MixedDomain::lens(PI / 4.0, FRAC_PI_2).unwrap();
        let upper = d.gamma1().as_arc().unwrap().circle();
        assert!((upper.radius - 1.0).abs() < 1e-12);
        assert!((upper.center - Point::new(0.0, -2f64.sqrt())).norm() < 1e-12);
    }

    #[test]
    fn empty_interior_is_rejected() {
        let arc = BoundaryCurve::arc(Arc::new(Circle::unit(), -2.0, 1.0).unwrap());
        let err = MixedDomain::new(arc.clone(), arc, ArcRole::Gamma2IsArc).unwrap_err();
        assert!(matches!(err, GeometryError::EmptyInterior(_)), "{err:?}");
    }

    #[test]
    fn mismatched_role_or_endpoints_are_rejected() {
        let arc = BoundaryCurve::arc(Arc::new(Circle::unit(), 0.0, PI).unwrap());
        let diam = BoundaryCurve::segment(Point::new(1.0, 0.0), Point::new(-1.0, 0.0)).unwrap();
        assert!(matches!(
            MixedDomain::new(arc.clone(), diam.clone(), ArcRole::Gamma2IsArc),
            Err(GeometryError::ArcRoleMismatch(_))
        ));
        let short = BoundaryCurve::segment(Point::new(1.0, 0.0), Point::new(-0.5, 0.0)).unwrap();
        assert!(MixedDomain::new(arc, short, ArcRole::Gamma1IsArc).is_err());
    }
}
