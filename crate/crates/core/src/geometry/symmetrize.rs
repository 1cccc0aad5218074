use std::f64::consts::PI;

use super::curve::BoundaryCurve;
use super::domain::{ArcRole, Location, MixedDomain};
use super::predicates::{is_convex, Convexity};
use super::{point_in_polygon, Circle, GeometryError, Point, DEFAULT_SAMPLES, GEOM_TOL};

/// Radius of the clip disk (about the inversion center) for unbounded
/// symmetrizations.
pub const DEFAULT_CLIP_RADIUS: f64 = 50.0;

const DETECT_SAMPLES: usize = 4096;
const CLIP_ARC_STEP: f64 = 2.0 * PI / 512.0;

/// `D* = D ∪ γ₂ ∪ D_s`, where `D_s` is the inversion of `D` in the circle
/// carrying γ₂.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetrizedDomain {
    original: MixedDomain,
    inversion_circle: Circle,
    mirror_boundary: Option<BoundaryCurve>,
    mirror_samples: Vec<Point>,
    full_boundary: Vec<Point>,
    clip_radius: Option<f64>,
}

/// Symmetrizes with the default clip radius.
pub fn symmetrize_domain(domain: &MixedDomain) -> Result<SymmetrizedDomain, GeometryError> {
    SymmetrizedDomain::new(domain, DEFAULT_CLIP_RADIUS)
}

impl SymmetrizedDomain {
    pub fn new(domain: &MixedDomain, clip_radius: f64) -> Result<Self, GeometryError> {
        if domain.arc_role() != ArcRole::Gamma2IsArc {
            return Err(GeometryError::ArcRoleMismatch(
                "symmetrization reflects across γ₂, which must be the arc".to_string(),
            ));
        }
        let arc = domain.arc();
        let circle = arc.circle();
        if arc.sweep().abs() > PI + GEOM_TOL {
            return Err(GeometryError::Unbounded(format!(
                "γ₂ subtends {:.6} > π so the inversion center lies in D",
                arc.sweep().abs()
            )));
        }
        if domain.contains(circle.center) == Location::Interior {
            return Err(GeometryError::Unbounded(
                "the inversion center is interior to D".to_string(),
            ));
        }
        let gamma1 = domain.gamma1();
        let inner = circle.radius * circle.radius / clip_radius;
        let window = clip_window(gamma1, circle.center, inner)?;
        let invert = |p: Point| circle.invert(p);

        let mut full = gamma1.samples(DEFAULT_SAMPLES);
        let (mirror_boundary, mirror_samples, clip) = match window {
            None => {
                let mirror = gamma1.invert(&circle)?;
                let samples = mirror.samples(DEFAULT_SAMPLES);
                full.extend(samples.iter().rev().skip(1).take(samples.len() - 2));
                (Some(mirror), samples, None)
            }
            Some((ta, tb)) => {
                // Mirror of γ₁ on [0, ta] and [tb, 1]; the gap is closed by
                // an arc of the clip circle.
                let half = DEFAULT_SAMPLES / 2;
                let head: Vec<Point> = (0..=half)
                    .map(|k| invert(gamma1.point(ta * k as f64 / half as f64)))
                    .collect::<Result<_, _>>()?;
                let tail: Vec<Point> = (0..=half)
                    .map(|k| invert(gamma1.point(tb + (1.0 - tb) * k as f64 / half as f64)))
                    .collect::<Result<_, _>>()?;
                let exit = tail[0];
                let entry = head[half];
                full.extend(tail.iter().rev().skip(1));
                let start = (exit - circle.center).arg();
                let end = (entry - circle.center).arg();
                let sweep = if domain.orientation() > 0.0 {
                    (end - start).rem_euclid(2.0 * PI)
                } else {
                    -(start - end).rem_euclid(2.0 * PI)
                };
                let steps = ((sweep.abs() / CLIP_ARC_STEP).ceil() as usize).max(2);
                full.extend((1..steps).map(|k| {
                    circle.center + Point::from_polar(clip_radius, start + sweep * k as f64 / steps as f64)
                }));
                full.extend(head.iter().rev().take(half));
                let mut samples = head;
                samples.extend(tail);
                (None, samples, Some(clip_radius))
            }
        };
        let convex = is_convex(&full, GEOM_TOL)?;
        if let Convexity::NotConvex { witness } = convex {
            return Err(GeometryError::InvalidDomain(format!(
                "symmetrized boundary is not convex near {}",
                witness[1]
            )));
        }
        Ok(Self {
            original: domain.clone(),
            inversion_circle: circle,
            mirror_boundary,
            mirror_samples,
            full_boundary: full,
            clip_radius: clip,
        })
    }

    pub fn original(&self) -> &MixedDomain {
        &self.original
    }

    pub fn inversion_circle(&self) -> Circle {
        self.inversion_circle
    }

    /// Exact image of γ₁, present when the image is bounded.
    pub fn mirror_boundary(&self) -> Option<&BoundaryCurve> {
        self.mirror_boundary.as_ref()
    }

    /// Pointwise inversion of γ₁ samples (the clipped part omitted).
    pub fn mirror_samples(&self) -> &[Point] {
        &self.mirror_samples
    }

    /// Closed boundary of `D*`: γ₁ followed by the reversed mirror.
    pub fn full_boundary(&self) -> &[Point] {
        &self.full_boundary
    }

    pub fn is_bounded(&self) -> bool {
        self.clip_radius.is_none()
    }

    /// The clip radius when the symmetrization had to be clipped.
    pub fn clip_radius(&self) -> Option<f64> {
        self.clip_radius
    }

    pub fn contains(&self, z: Point) -> bool {
        point_in_polygon(&self.full_boundary, z)
    }

    /// `σ_C` of the inversion circle.
    pub fn reflect(&self, z: Point) -> Result<Point, GeometryError> {
        self.inversion_circle.invert(z)
    }
}

/// Parameter interval where γ₁ comes within `inner` of `center`, i.e. where
/// its mirror image lies beyond the clip circle.
fn clip_window(
    curve: &BoundaryCurve,
    center: Point,
    inner: f64,
) -> Result<Option<(f64, f64)>, GeometryError> {
    let close = |t: f64| (curve.point(t) - center).norm() < inner;
    let ts: Vec<f64> = (0..=DETECT_SAMPLES)
        .map(|k| k as f64 / DETECT_SAMPLES as f64)
        .collect();
    let flags: Vec<bool> = ts.iter().map(|&t| close(t)).collect();
    let Some(first) = flags.iter().position(|&f| f) else {
        // A near pass between samples still leaves the image bounded but
        // huge; treat distances just above the clip as bounded.
        return Ok(None);
    };
    let last = flags.iter().rposition(|&f| f).unwrap();
    if flags[first..=last].iter().any(|&f| !f) {
        return Err(GeometryError::Unbounded(
            "γ₁ approaches the inversion center more than once".to_string(),
        ));
    }
    if first == 0 || last == DETECT_SAMPLES {
        return Err(GeometryError::Unbounded(
            "a corner lies inside the clip window".to_string(),
        ));
    }
    let bisect = |mut far: f64, mut near: f64| {
        for _ in 0..60 {
            let mid = 0.5 * (far + near);
            if close(mid) {
                near = mid;
            } else {
                far = mid;
            }
        }
        far
    };
    Ok(Some((
        bisect(ts[first - 1], ts[first]),
        bisect(ts[last + 1], ts[last]),
    )))
}
