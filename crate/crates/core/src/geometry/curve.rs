use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{cross, dot, wrap_positive, Circle, GeometryError, Point, DEFAULT_SAMPLES};

/// A circular arc `t ↦ c + R·exp(i(start + t·sweep))`, `t ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    circle: Circle,
    start_angle: f64,
    sweep: f64,
}

/// Closest point of a curve to a query point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nearest {
    pub point: Point,
    pub t: f64,
    pub distance: f64,
    pub kind: NearestKind,
}

/// Local shape of the curve at the closest point. Tangents are unit vectors
/// in the direction of increasing parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NearestKind {
    Smooth { tangent: Point },
    Vertex { incoming: Point, outgoing: Point },
    Start { tangent: Point },
    End { tangent: Point },
}

impl Arc {
    pub fn new(circle: Circle, start_angle: f64, sweep: f64) -> Result<Self, GeometryError> {
        if !(sweep.is_finite() && sweep != 0.0 && sweep.abs() < 2.0 * PI) {
            return Err(GeometryError::InvalidCurve(format!(
                "arc sweep {sweep} must lie in (0, 2π) in magnitude"
            )));
        }
        Ok(Self {
            circle,
            start_angle,
            sweep,
        })
    }

    /// The arc from `start` through `mid` to `end`.
    pub fn through(start: Point, mid: Point, end: Point) -> Result<Self, GeometryError> {
        let circle = Circle::through(start, mid, end)
            .ok_or_else(|| GeometryError::InvalidCurve("arc points are collinear".to_string()))?;
        let a0 = circle.angle_of(start);
        let dm = wrap_positive(circle.angle_of(mid) - a0);
        let de = wrap_positive(circle.angle_of(end) - a0);
        let sweep = if dm < de { de } else { de - 2.0 * PI };
        Self::new(circle, a0, sweep)
    }

    pub fn circle(&self) -> Circle {
        self.circle
    }

    pub fn start_angle(&self) -> f64 {
        self.start_angle
    }

    pub fn sweep(&self) -> f64 {
        self.sweep
    }

    pub fn point(&self, t: f64) -> Point {
        self.circle.point_at(self.start_angle + t * self.sweep)
    }

    pub fn tangent(&self, t: f64) -> Point {
        let theta = self.start_angle + t * self.sweep;
        Point::new(0.0, self.sweep.signum()) * Point::from_polar(1.0, theta)
    }

    pub fn length(&self) -> f64 {
        self.circle.radius * self.sweep.abs()
    }

    /// Parameter of the point at polar angle `angle`, if it lies on the arc.
    pub fn param_of_angle(&self, angle: f64) -> Option<f64> {
        let u = wrap_positive((angle - self.start_angle) * self.sweep.signum());
        let span = self.sweep.abs();
        if u <= span {
            Some(u / span)
        } else {
            None
        }
    }

    pub fn reversed(&self) -> Self {
        Self {
            circle: self.circle,
            start_angle: self.start_angle + self.sweep,
            sweep: -self.sweep,
        }
    }

    pub fn rotated(&self, angle: f64) -> Self {
        let rot = Point::from_polar(1.0, angle);
        Self {
            circle: Circle {
                center: self.circle.center * rot,
                radius: self.circle.radius,
            },
            start_angle: self.start_angle + angle,
            sweep: self.sweep,
        }
    }

    pub fn nearest(&self, z: Point) -> Nearest {
        let d = z - self.circle.center;
        if d.norm() > 0.0 {
            if let Some(t) = self.param_of_angle(d.arg()) {
                if t > 1e-12 && t < 1.0 - 1e-12 {
                    let p = self.point(t);
                    return Nearest {
                        point: p,
                        t,
                        distance: (z - p).norm(),
                        kind: NearestKind::Smooth {
                            tangent: self.tangent(t),
                        },
                    };
                }
            }
        }
        let (p0, p1) = (self.point(0.0), self.point(1.0));
        let (d0, d1) = ((z - p0).norm(), (z - p1).norm());
        if d0 <= d1 {
            Nearest {
                point: p0,
                t: 0.0,
                distance: d0,
                kind: NearestKind::Start {
                    tangent: self.tangent(0.0),
                },
            }
        } else {
            Nearest {
                point: p1,
                t: 1.0,
                distance: d1,
                kind: NearestKind::End {
                    tangent: self.tangent(1.0),
                },
            }
        }
    }

    /// Positive ray parameters `s` with `origin + s·dir` on the arc
    /// (`dir` a unit vector).
    pub fn ray_hits(&self, origin: Point, dir: Point) -> Vec<f64> {
        let oc = origin - self.circle.center;
        let b = dot(dir, oc);
        let c = oc.norm_sqr() - self.circle.radius * self.circle.radius;
        let disc = b * b - c;
        if disc < 0.0 {
            return Vec::new();
        }
        let sq = disc.sqrt();
        [-b - sq, -b + sq]
            .into_iter()
            .filter(|&s| s > 0.0)
            .filter(|&s| {
                let p = origin + dir * s;
                self.param_of_angle(self.circle.angle_of(p)).is_some()
            })
            .collect()
    }
}

/// An open polyline parameterised by normalised arc length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point>", into = "Vec<Point>")]
pub struct Polyline {
    points: Vec<Point>,
    cumulative: Vec<f64>,
}

impl TryFrom<Vec<Point>> for Polyline {
    type Error = GeometryError;

    fn try_from(points: Vec<Point>) -> Result<Self, Self::Error> {
        Polyline::new(points)
    }
}

impl From<Polyline> for Vec<Point> {
    fn from(p: Polyline) -> Self {
        p.points
    }
}

impl Polyline {
    pub fn new(points: Vec<Point>) -> Result<Self, GeometryError> {
        if points.len() < 3 {
            return Err(GeometryError::TooFewPoints(points.len()));
        }
        if let Some(p) = points.iter().find(|p| !(p.re.is_finite() && p.im.is_finite())) {
            return Err(GeometryError::NonFinite(*p));
        }
        let scale = points
            .iter()
            .map(|p| (p - points[0]).norm())
            .fold(0.0, f64::max)
            .max(1e-300);
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                if (points[i] - points[j]).norm() <= 1e-14 * scale {
                    return Err(GeometryError::InvalidCurve(format!(
                        "samples {i} and {j} coincide at {}",
                        points[i]
                    )));
                }
            }
        }
        let n = points.len();
        for i in 0..n - 1 {
            for j in i + 2..n - 1 {
                if segments_intersect(points[i], points[i + 1], points[j], points[j + 1]) {
                    return Err(GeometryError::InvalidCurve(format!(
                        "segments {i} and {j} intersect"
                    )));
                }
            }
        }
        let mut cumulative = Vec::with_capacity(n);
        cumulative.push(0.0);
        for w in points.windows(2) {
            let last = *cumulative.last().unwrap();
            cumulative.push(last + (w[1] - w[0]).norm());
        }
        Ok(Self { points, cumulative })
    }

    /// The straight segment `[a, b]`, stored with its midpoint.
    pub fn segment(a: Point, b: Point) -> Result<Self, GeometryError> {
        Self::new(vec![a, (a + b) * 0.5, b])
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn length(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    fn locate(&self, t: f64) -> (usize, f64) {
        let s = t.clamp(0.0, 1.0) * self.length();
        let k = match self.cumulative.binary_search_by(|c| c.partial_cmp(&s).unwrap()) {
            Ok(k) => k.min(self.points.len() - 2),
            Err(k) => (k.max(1) - 1).min(self.points.len() - 2),
        };
        let seg = self.cumulative[k + 1] - self.cumulative[k];
        (k, ((s - self.cumulative[k]) / seg).clamp(0.0, 1.0))
    }

    pub fn point(&self, t: f64) -> Point {
        let (k, u) = self.locate(t);
        self.points[k] + (self.points[k + 1] - self.points[k]) * u
    }

    fn direction(&self, k: usize) -> Point {
        let d = self.points[k + 1] - self.points[k];
        d / d.norm()
    }

    pub fn nearest(&self, z: Point) -> Nearest {
        let n = self.points.len();
        let mut best: Option<(f64, usize, f64)> = None;
        for k in 0..n - 1 {
            let a = self.points[k];
            let d = self.points[k + 1] - a;
            let u = (dot(z - a, d) / d.norm_sqr()).clamp(0.0, 1.0);
            let dist = (z - (a + d * u)).norm();
            if best.is_none_or(|(bd, _, _)| dist < bd) {
                best = Some((dist, k, u));
            }
        }
        let (distance, k, u) = best.unwrap();
        let eps = 1e-12;
        let point = self.points[k] + (self.points[k + 1] - self.points[k]) * u;
        let t = (self.cumulative[k] + u * (self.cumulative[k + 1] - self.cumulative[k])) / self.length();
        let kind = if u > eps && u < 1.0 - eps {
            NearestKind::Smooth {
                tangent: self.direction(k),
            }
        } else {
            let v = if u <= eps { k } else { k + 1 };
            if v == 0 {
                NearestKind::Start {
                    tangent: self.direction(0),
                }
            } else if v == n - 1 {
                NearestKind::End {
                    tangent: self.direction(n - 2),
                }
            } else {
                NearestKind::Vertex {
                    incoming: self.direction(v - 1),
                    outgoing: self.direction(v),
                }
            }
        };
        Nearest {
            point,
            t,
            distance,
            kind,
        }
    }

    pub fn ray_hits(&self, origin: Point, dir: Point) -> Vec<f64> {
        let mut hits = Vec::new();
        for w in self.points.windows(2) {
            let e = w[1] - w[0];
            let denom = cross(dir, e);
            if denom.abs() < 1e-300 {
                continue;
            }
            let ao = w[0] - origin;
            let s = cross(ao, e) / denom;
            let u = cross(ao, dir) / denom;
            if s > 0.0 && (-1e-12..=1.0 + 1e-12).contains(&u) {
                hits.push(s);
            }
        }
        hits
    }
}

fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = cross(b - a, c - a);
    let d2 = cross(b - a, d - a);
    let d3 = cross(d - c, a - c);
    let d4 = cross(d - c, b - c);
    (d1 * d2 < 0.0) && (d3 * d4 < 0.0)
}

/// One boundary curve of a mixed domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundaryCurve {
    CircularArc(Arc),
    Sampled(Polyline),
}

impl BoundaryCurve {
    pub fn arc(arc: Arc) -> Self {
        Self::CircularArc(arc)
    }

    pub fn segment(a: Point, b: Point) -> Result<Self, GeometryError> {
        Ok(Self::Sampled(Polyline::segment(a, b)?))
    }

    pub fn polyline(points: Vec<Point>) -> Result<Self, GeometryError> {
        Ok(Self::Sampled(Polyline::new(points)?))
    }

    pub fn as_arc(&self) -> Option<&Arc> {
        match self {
            Self::CircularArc(a) => Some(a),
            Self::Sampled(_) => None,
        }
    }

    pub fn point(&self, t: f64) -> Point {
        match self {
            Self::CircularArc(a) => a.point(t),
            Self::Sampled(p) => p.point(t),
        }
    }

    pub fn start(&self) -> Point {
        self.point(0.0)
    }

    pub fn end(&self) -> Point {
        self.point(1.0)
    }

    pub fn length(&self) -> f64 {
        match self {
            Self::CircularArc(a) => a.length(),
            Self::Sampled(p) => p.length(),
        }
    }

    /// `n ≥ 2` samples from start to end. Polyline vertices are always kept.
    pub fn samples(&self, n: usize) -> Vec<Point> {
        let n = n.max(2);
        match self {
            Self::CircularArc(a) => (0..n).map(|k| a.point(k as f64 / (n - 1) as f64)).collect(),
            Self::Sampled(p) => {
                let pts = p.points();
                let total = p.length();
                let mut out = vec![pts[0]];
                for w in pts.windows(2) {
                    let m = (((n - 1) as f64 * (w[1] - w[0]).norm() / total).round() as usize).max(1);
                    for j in 1..=m {
                        out.push(w[0] + (w[1] - w[0]) * (j as f64 / m as f64));
                    }
                }
                out
            }
        }
    }

    pub fn nearest(&self, z: Point) -> Nearest {
        match self {
            Self::CircularArc(a) => a.nearest(z),
            Self::Sampled(p) => p.nearest(z),
        }
    }

    pub fn distance(&self, z: Point) -> f64 {
        self.nearest(z).distance
    }

    pub fn ray_hits(&self, origin: Point, dir: Point) -> Vec<f64> {
        match self {
            Self::CircularArc(a) => a.ray_hits(origin, dir),
            Self::Sampled(p) => p.ray_hits(origin, dir),
        }
    }

    /// Unit half-tangent at the start, pointing into the curve. Sampled
    /// curves use the secant through the first two samples.
    pub fn start_half_tangent(&self) -> Result<Point, GeometryError> {
        match self {
            Self::CircularArc(a) => Ok(a.tangent(0.0)),
            Self::Sampled(p) => unit(p.points()[1] - p.points()[0], p.points()[0]),
        }
    }

    /// Unit half-tangent at the end, pointing back into the curve.
    pub fn end_half_tangent(&self) -> Result<Point, GeometryError> {
        match self {
            Self::CircularArc(a) => Ok(-a.tangent(1.0)),
            Self::Sampled(p) => {
                let pts = p.points();
                let n = pts.len();
                unit(pts[n - 2] - pts[n - 1], pts[n - 1])
            }
        }
    }

    pub fn reversed(&self) -> Self {
        match self {
            Self::CircularArc(a) => Self::CircularArc(a.reversed()),
            Self::Sampled(p) => {
                let mut pts = p.points().to_vec();
                pts.reverse();
                Self::Sampled(Polyline::new(pts).expect("reversal preserves validity"))
            }
        }
    }

    pub fn rotated(&self, angle: f64) -> Self {
        match self {
            Self::CircularArc(a) => Self::CircularArc(a.rotated(angle)),
            Self::Sampled(p) => {
                let rot = Point::from_polar(1.0, angle);
                Self::Sampled(
                    Polyline::new(p.points().iter().map(|z| z * rot).collect())
                        .expect("rotation preserves validity"),
                )
            }
        }
    }

    /// Image under inversion in `circle`. Arcs whose circle avoids the
    /// inversion center map to exact arcs; everything else is inverted
    /// sample by sample.
    pub fn invert(&self, circle: &Circle) -> Result<Self, GeometryError> {
        if let Self::CircularArc(a) = self {
            if a.circle().distance(circle.center) > 1e-9 * a.circle().radius {
                let map = |t: f64| circle.invert(a.point(t));
                return Ok(Self::CircularArc(Arc::through(map(0.0)?, map(0.5)?, map(1.0)?)?));
            }
        }
        let pts = self
            .samples(DEFAULT_SAMPLES)
            .into_iter()
            .map(|z| circle.invert(z))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::Sampled(Polyline::new(pts)?))
    }
}

fn unit(v: Point, at: Point) -> Result<Point, GeometryError> {
    let n = v.norm();
    if n <= 1e-300 {
        Err(GeometryError::ZeroTangent(at))
    } else {
        Ok(v / n)
    }
}
