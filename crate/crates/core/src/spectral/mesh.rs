use std::collections::HashSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use spade::{AngleLimit, ConstrainedDelaunayTriangulation, Point2, RefinementParameters, Triangulation};

use super::SpectralError;
use crate::geometry::{BoundaryCurve, MixedDomain};
use crate::Point;

/// Boundary condition carried by a boundary edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EdgeTag {
    /// On γ₁.
    Neumann,
    /// On γ₂.
    Dirichlet,
}

impl EdgeTag {
    fn as_str(self) -> &'static str {
        match self {
            Self::Neumann => "NEUMANN",
            Self::Dirichlet => "DIRICHLET",
        }
    }
}

/// A conforming triangulation with counterclockwise triangles and tagged
/// boundary edges.
#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    boundary_edges: Vec<(usize, usize, EdgeTag)>,
    h: f64,
}

/// Boundary spacing at the corners is `h / CORNER_REFINEMENT`.
pub const CORNER_REFINEMENT: f64 = 4.0;
/// Minimum angle requested from the Delaunay refinement, in degrees.
pub const REFINEMENT_ANGLE_DEG: f64 = 28.0;

impl TriMesh {
    /// Validates and wraps raw mesh data. Triangles are reoriented
    /// counterclockwise.
    pub fn new(
        vertices: Vec<Point>,
        mut triangles: Vec<[usize; 3]>,
        boundary_edges: Vec<(usize, usize, EdgeTag)>,
        h: f64,
    ) -> Result<Self, SpectralError> {
        let n = vertices.len();
        if let Some(t) = triangles.iter().find(|t| t.iter().any(|&v| v >= n)) {
            return Err(SpectralError::InvalidMesh(format!(
                "triangle {t:?} indexes past {n} vertices"
            )));
        }
        if let Some(e) = boundary_edges.iter().find(|e| e.0 >= n || e.1 >= n) {
            return Err(SpectralError::InvalidMesh(format!(
                "boundary edge {e:?} indexes past {n} vertices"
            )));
        }
        for (i, t) in triangles.iter_mut().enumerate() {
            let a = signed_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]);
            if a.abs() <= 1e-14 * h * h {
                return Err(SpectralError::DegenerateTriangle { index: i, area: a });
            }
            if a < 0.0 {
                t.swap(1, 2);
            }
        }
        let mesh = Self {
            vertices,
            triangles,
            boundary_edges,
            h,
        };
        let tagged: HashSet<(usize, usize)> = mesh
            .boundary_edges
            .iter()
            .map(|&(a, b, _)| (a.min(b), a.max(b)))
            .collect();
        for e in mesh.topological_boundary() {
            if !tagged.contains(&e) {
                return Err(SpectralError::InvalidMesh(format!(
                    "boundary edge {e:?} is untagged"
                )));
            }
        }
        Ok(mesh)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary_edges(&self) -> &[(usize, usize, EdgeTag)] {
        &self.boundary_edges
    }

    /// Nominal mesh size.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn area(&self) -> f64 {
        self.triangles.iter().map(|t| self.triangle_area(t)).sum()
    }

    pub(crate) fn triangle_area(&self, t: &[usize; 3]) -> f64 {
        signed_area(self.vertices[t[0]], self.vertices[t[1]], self.vertices[t[2]])
    }

    /// Undirected edges `(min, max)` in first-seen order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                let e = (a.min(b), a.max(b));
                if seen.insert(e) {
                    out.push(e);
                }
            }
        }
        out
    }

    /// Edges used by exactly one triangle.
    fn topological_boundary(&self) -> Vec<(usize, usize)> {
        let mut count = std::collections::HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                *count.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        let mut out: Vec<_> = count
            .into_iter()
            .filter(|(_, c)| *c == 1)
            .map(|(e, _)| e)
            .collect();
        out.sort_unstable();
        out
    }

    /// Vertices lying on a Dirichlet edge.
    pub fn dirichlet_vertices(&self) -> Vec<bool> {
        let mut d = vec![false; self.vertices.len()];
        for &(a, b, tag) in &self.boundary_edges {
            if tag == EdgeTag::Dirichlet {
                d[a] = true;
                d[b] = true;
            }
        }
        d
    }

    /// The same mesh with every boundary edge tagged `tag`.
    pub fn retagged(&self, tag: EdgeTag) -> Self {
        let mut m = self.clone();
        for e in &mut m.boundary_edges {
            e.2 = tag;
        }
        m
    }

    /// Smallest interior angle over all triangles, in radians.
    pub fn min_angle(&self) -> f64 {
        let mut min = std::f64::consts::PI;
        for t in &self.triangles {
            for k in 0..3 {
                let p = self.vertices[t[k]];
                let u = self.vertices[t[(k + 1) % 3]] - p;
                let v = self.vertices[t[(k + 2) % 3]] - p;
                min = min.min((u.conj() * v).arg().abs());
            }
        }
        min
    }

    /// `∫ f` for the piecewise-linear interpolant of nodal values.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.triangles
            .iter()
            .map(|t| self.triangle_area(t) * (values[t[0]] + values[t[1]] + values[t[2]]) / 3.0)
            .sum()
    }

    /// Plain-text form: vertex count, `x y` lines, triangle count, `i j k`
    /// lines, then `i j TAG` boundary-edge lines. A leading `# h = …`
    /// comment records the nominal mesh size.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# h = {}", self.h);
        let _ = writeln!(s, "{}", self.vertices.len());
        for v in &self.vertices {
            let _ = writeln!(s, "{} {}", v.re, v.im);
        }
        let _ = writeln!(s, "{}", self.triangles.len());
        for t in &self.triangles {
            let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
        }
        for (a, b, tag) in &self.boundary_edges {
            let _ = writeln!(s, "{a} {b} {}", tag.as_str());
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, SpectralError> {
        let mut h = None;
        let mut data = Vec::new();
        for (i, l) in text.lines().enumerate() {
            let l = l.trim();
            if let Some(rest) = l.strip_prefix('#') {
                if let Some(v) = rest.trim().strip_prefix("h =") {
                    h = v.trim().parse::<f64>().ok();
                }
            } else if !l.is_empty() {
                data.push((i + 1, l));
            }
        }
        let bad = |line: usize, what: &str| SpectralError::MeshFormat {
            line,
            message: what.to_string(),
        };
        let mut it = data.into_iter();
        let (i, l) = it.next().ok_or_else(|| bad(0, "missing vertex count"))?;
        let nv: usize = l.parse().map_err(|_| bad(i, "bad vertex count"))?;
        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let (i, l) = it.next().ok_or_else(|| bad(0, "too few vertex lines"))?;
            let xy: Vec<f64> = l
                .split_whitespace()
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|_| bad(i, "bad vertex"))?;
            if xy.len() != 2 {
                return Err(bad(i, "vertex needs two coordinates"));
            }
            vertices.push(Point::new(xy[0], xy[1]));
        }
        let (i, l) = it.next().ok_or_else(|| bad(0, "missing triangle count"))?;
        let nt: usize = l.parse().map_err(|_| bad(i, "bad triangle count"))?;
        let mut triangles = Vec::with_capacity(nt);
        for _ in 0..nt {
            let (i, l) = it.next().ok_or_else(|| bad(0, "too few triangle lines"))?;
            let ijk: Vec<usize> = l
                .split_whitespace()
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|_| bad(i, "bad triangle"))?;
            if ijk.len() != 3 {
                return Err(bad(i, "triangle needs three indices"));
            }
            triangles.push([ijk[0], ijk[1], ijk[2]]);
        }
        let mut boundary_edges = Vec::new();
        for (i, l) in it {
            let f: Vec<&str> = l.split_whitespace().collect();
            if f.len() != 3 {
                return Err(bad(i, "boundary edge needs `i j TAG`"));
            }
            let a = f[0].parse().map_err(|_| bad(i, "bad edge index"))?;
            let b = f[1].parse().map_err(|_| bad(i, "bad edge index"))?;
            let tag = match f[2] {
                "NEUMANN" => EdgeTag::Neumann,
                "DIRICHLET" => EdgeTag::Dirichlet,
                other => return Err(bad(i, &format!("unknown tag {other}"))),
            };
            boundary_edges.push((a, b, tag));
        }
        let h = match h {
            Some(h) => h,
            None => max_edge(&vertices, &triangles),
        };
        Self::new(vertices, triangles, boundary_edges, h)
    }
}

fn max_edge(vertices: &[Point], triangles: &[[usize; 3]]) -> f64 {
    triangles
        .iter()
        .flat_map(|t| (0..3).map(move |k| (vertices[t[k]] - vertices[t[(k + 1) % 3]]).norm()))
        .fold(0.0, f64::max)
}

fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b - a).re * (c - a).im - (b - a).im * (c - a).re)
}

/// Spacing at arc-length distance `d` from the nearest corner.
fn spacing(h: f64, d: f64) -> f64 {
    (h / CORNER_REFINEMENT + 0.5 * d).min(h)
}

/// Arc-length positions on `[a, b]` of a curve of length `total`, graded
/// toward the curve ends.
fn piece_positions(a: f64, b: f64, total: f64, h: f64) -> Vec<f64> {
    let mut s = vec![a];
    let mut x = a;
    while x < b {
        x += spacing(h, x.min(total - x).max(0.0));
        s.push(x);
    }
    // drop a tiny last step, then stretch onto [a, b]
    if s.len() > 2 {
        let last = s[s.len() - 1] - s[s.len() - 2];
        if b - s[s.len() - 2] < 0.3 * last {
            s.pop();
        }
    }
    let end = *s.last().unwrap();
    let scale = (b - a) / (end - a);
    s.iter().map(|x| a + (x - a) * scale).collect()
}

/// Samples of `curve` from start to end, keeping polyline vertices.
fn curve_samples(curve: &BoundaryCurve, h: f64) -> Vec<Point> {
    let total = curve.length();
    let breaks: Vec<f64> = match curve {
        BoundaryCurve::CircularArc(_) => vec![0.0, total],
        BoundaryCurve::Sampled(p) => {
            let mut acc = vec![0.0];
            for w in p.points().windows(2) {
                acc.push(acc.last().unwrap() + (w[1] - w[0]).norm());
            }
            acc
        }
    };
    let mut out = vec![curve.start()];
    for w in breaks.windows(2) {
        let pos = piece_positions(w[0], w[1], total, h);
        for s in &pos[1..] {
            out.push(curve.point(s / total));
        }
    }
    if let BoundaryCurve::Sampled(p) = curve {
        // exact polyline vertices at the piece ends
        let mut k = 0;
        for (i, w) in breaks.windows(2).enumerate() {
            k += piece_positions(w[0], w[1], total, h).len() - 1;
            out[k] = p.points()[i + 1];
        }
    }
    out
}

/// Triangulates `domain` with boundary vertices placed exactly on γ₁ and
/// γ₂, boundary spacing `h` graded to `h/4` at the two corners, and
/// constrained Delaunay refinement to triangle area `√3h²/4` and minimum
/// angle about 28°.
pub fn mesh_domain(domain: &MixedDomain, h: f64) -> Result<TriMesh, SpectralError> {
    if !(h > 0.0 && h < domain.diameter() / 4.0) {
        return Err(SpectralError::Meshing(format!(
            "h = {h} must lie in (0, diameter/4 = {})",
            domain.diameter() / 4.0
        )));
    }
    let g1 = curve_samples(domain.gamma1(), h);
    let g2 = curve_samples(domain.gamma2(), h);
    let mut boundary: Vec<(Point, EdgeTag)> = g1.iter().map(|p| (*p, EdgeTag::Neumann)).collect();
    // the last γ₁ sample is the corner γ₂(1); edges leaving it run along γ₂
    boundary.last_mut().unwrap().1 = EdgeTag::Dirichlet;
    for p in g2.iter().rev().skip(1).take(g2.len() - 2) {
        boundary.push((*p, EdgeTag::Dirichlet));
    }

    let mut cdt = ConstrainedDelaunayTriangulation::<Point2<f64>>::new();
    let mut handles = Vec::with_capacity(boundary.len());
    for (p, _) in &boundary {
        let v = cdt
            .insert(Point2::new(p.re, p.im))
            .map_err(|e| SpectralError::Meshing(format!("inserting {p}: {e:?}")))?;
        handles.push(v);
    }
    let nb = handles.len();
    for i in 0..nb {
        let (a, b) = (handles[i], handles[(i + 1) % nb]);
        if a == b || !cdt.can_add_constraint(a, b) {
            return Err(SpectralError::Meshing(format!(
                "boundary segment {i} coincides with or crosses another"
            )));
        }
        cdt.add_constraint(a, b);
    }
    let max_area = 3f64.sqrt() / 4.0 * h * h;
    let result = cdt.refine(
        RefinementParameters::<f64>::new()
            .exclude_outer_faces(true)
            .keep_constraint_edges()
            .with_angle_limit(AngleLimit::from_deg(REFINEMENT_ANGLE_DEG))
            .with_max_allowed_area(max_area)
            .with_max_additional_vertices(50 * (domain.area() / max_area) as usize + 10_000),
    );
    if !result.refinement_complete {
        return Err(SpectralError::Meshing(
            "refinement ran out of vertices".to_string(),
        ));
    }
    let excluded: HashSet<_> = result.excluded_faces.into_iter().collect();

    let mut index = vec![usize::MAX; cdt.num_vertices()];
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for face in cdt.inner_faces() {
        if excluded.contains(&face.fix()) {
            continue;
        }
        let mut tri = [0; 3];
        for (k, v) in face.vertices().iter().enumerate() {
            let i = v.fix().index();
            if index[i] == usize::MAX {
                index[i] = vertices.len();
                let p = v.position();
                vertices.push(Point::new(p.x, p.y));
            }
            tri[k] = index[i];
        }
        triangles.push(tri);
    }
    // boundary vertices keep their exact coordinates
    for ((p, _), hnd) in boundary.iter().zip(&handles) {
        let i = index[hnd.index()];
        if i == usize::MAX {
            return Err(SpectralError::Meshing(format!("boundary vertex {p} lost")));
        }
        vertices[i] = *p;
    }
    let boundary_edges = (0..nb)
        .map(|i| {
            (
                index[handles[i].index()],
                index[handles[(i + 1) % nb].index()],
                boundary[i].1,
            )
        })
        .collect();
    TriMesh::new(vertices, triangles, boundary_edges, h)
}

/// Barycentric point location on a bucket grid.
#[derive(Debug, Clone)]
pub(crate) struct Locator {
    origin: Point,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<usize>>,
}

impl Locator {
    pub(crate) fn new(mesh: &TriMesh) -> Self {
        let (mut lo, mut hi) = (
            Point::new(f64::INFINITY, f64::INFINITY),
            Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        );
        for v in &mesh.vertices {
            lo = Point::new(lo.re.min(v.re), lo.im.min(v.im));
            hi = Point::new(hi.re.max(v.re), hi.im.max(v.im));
        }
        let cell = mesh.h.max(1e-12);
        let nx = (((hi.re - lo.re) / cell).ceil() as usize).max(1);
        let ny = (((hi.im - lo.im) / cell).ceil() as usize).max(1);
        let mut buckets = vec![Vec::new(); nx * ny];
        let clampi = |v: f64, n: usize| (v.floor().max(0.0) as usize).min(n - 1);
        for (ti, t) in mesh.triangles.iter().enumerate() {
            let ps = t.map(|i| mesh.vertices[i]);
            let x0 = clampi(
                (ps.iter().map(|p| p.re).fold(f64::INFINITY, f64::min) - lo.re) / cell,
                nx,
            );
            let x1 = clampi(
                (ps.iter().map(|p| p.re).fold(f64::NEG_INFINITY, f64::max) - lo.re) / cell,
                nx,
            );
            let y0 = clampi(
                (ps.iter().map(|p| p.im).fold(f64::INFINITY, f64::min) - lo.im) / cell,
                ny,
            );
            let y1 = clampi(
                (ps.iter().map(|p| p.im).fold(f64::NEG_INFINITY, f64::max) - lo.im) / cell,
                ny,
            );
            for x in x0..=x1 {
                for y in y0..=y1 {
                    buckets[y * nx + x].push(ti);
                }
            }
        }
        Self {
            origin: lo,
            cell,
            nx,
            ny,
            buckets,
        }
    }

    /// Triangle and barycentric coordinates of `z`. Points just outside the
    /// polygonal mesh (between a chord and its arc) snap to the nearest
    /// triangle when its smallest barycentric coordinate is above `−slack`.
    pub(crate) fn locate(&self, mesh: &TriMesh, z: Point, slack: f64) -> Option<(usize, [f64; 3])> {
        let cx = ((z.re - self.origin.re) / self.cell).floor() as i64;
        let cy = ((z.im - self.origin.im) / self.cell).floor() as i64;
        let mut best: Option<(f64, usize, [f64; 3])> = None;
        for dx in -1..=1 {
            for dy in -1..=1 {
                let (x, y) = (cx + dx, cy + dy);
                if x < 0 || y < 0 || x >= self.nx as i64 || y >= self.ny as i64 {
                    continue;
                }
                for &ti in &self.buckets[y as usize * self.nx + x as usize] {
                    let b = barycentric(mesh, ti, z);
                    let m = b[0].min(b[1]).min(b[2]);
                    if m >= 0.0 {
                        return Some((ti, b));
                    }
                    if best.is_none_or(|(bm, _, _)| m > bm) {
                        best = Some((m, ti, b));
                    }
                }
            }
        }
        let (m, ti, b) = best?;
        if m < -slack {
            return None;
        }
        let c = b.map(|x| x.max(0.0));
        let s = c[0] + c[1] + c[2];
        Some((ti, c.map(|x| x / s)))
    }
}

fn barycentric(mesh: &TriMesh, ti: usize, z: Point) -> [f64; 3] {
    let t = mesh.triangles[ti];
    let (a, b, c) = (mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
    let area = signed_area(a, b, c);
    [
        signed_area(z, b, c) / area,
        signed_area(a, z, c) / area,
        signed_area(a, b, z) / area,
    ]
}

/// A nodal field on a mesh with piecewise-linear interpolation.
#[derive(Debug, Clone)]
pub struct NodalField<'a> {
    mesh: &'a TriMesh,
    values: &'a [f64],
    locator: Locator,
}

impl<'a> NodalField<'a> {
    pub fn new(mesh: &'a TriMesh, values: &'a [f64]) -> Result<Self, SpectralError> {
        if values.len() != mesh.vertices.len() {
            return Err(SpectralError::InvalidMesh(format!(
                "{} values for {} vertices",
                values.len(),
                mesh.vertices.len()
            )));
        }
        Ok(Self {
            mesh,
            values,
            locator: Locator::new(mesh),
        })
    }

    pub fn mesh(&self) -> &TriMesh {
        self.mesh
    }

    pub fn values(&self) -> &[f64] {
        self.values
    }

    /// Interpolated value at `z`; points within the chord-to-arc gap of a
    /// curved boundary are accepted.
    pub fn eval(&self, z: Point) -> Result<f64, SpectralError> {
        let (ti, b) = self
            .locator
            .locate(self.mesh, z, 0.25)
            .ok_or(SpectralError::SampleOutside(z))?;
        let t = self.mesh.triangles[ti];
        Ok(b[0] * self.values[t[0]] + b[1] * self.values[t[1]] + b[2] * self.values[t[2]])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DirichletPart;

    #[test]
    fn half_disk_mesh_topology() {
        let d = MixedDomain::half_disk(DirichletPart::Straight);
        let m = mesh_domain(&d, 0.1).unwrap();
        let (v, e, f) = (m.vertices().len(), m.edges().len(), m.triangles().len());
        assert_eq!(v as i64 - e as i64 + f as i64, 1);
        assert_eq!(m.boundary_edges().len(), m.topological_boundary().len());
        assert!((m.area() - std::f64::consts::FRAC_PI_2).abs() < 0.01);
        assert!(m.min_angle().to_degrees() >= 20.0);
        // boundary vertices lie on the true curves
        for &(a, b, tag) in m.boundary_edges() {
            let curve = match tag {
                EdgeTag::Neumann => d.gamma1(),
                EdgeTag::Dirichlet => d.gamma2(),
            };
            for i in [a, b] {
                let p = m.vertices()[i];
                assert!(curve.distance(p) < 1e-12 || d.gamma1().distance(p) < 1e-12);
            }
        }
    }

    #[test]
    fn sector_tags() {
        let d = MixedDomain::sector(std::f64::consts::FRAC_PI_4, DirichletPart::Straight).unwrap();
        let m = mesh_domain(&d, 0.08).unwrap();
        let dir: Vec<_> = m
            .boundary_edges()
            .iter()
            .filter(|e| e.2 == EdgeTag::Dirichlet)
            .map(|e| (m.vertices()[e.0] + m.vertices()[e.1]) * 0.5)
            .collect();
        // Dirichlet midpoints lie on the two radii, Neumann ones on the arc
        assert!(dir.iter().all(|p| p.norm() < 1.0 - 1e-3));
        assert!(m
            .boundary_edges()
            .iter()
            .filter(|e| e.2 == EdgeTag::Neumann)
            .all(|e| (m.vertices()[e.0].norm() - 1.0).abs() < 1e-12));
        assert!(m.min_angle().to_degrees() >= 20.0);
    }

    #[test]
    fn corners_are_refined() {
        let d = MixedDomain::half_disk(DirichletPart::Straight);
        let m = mesh_domain(&d, 0.1).unwrap();
        let shortest_at_corner = m
            .boundary_edges()
            .iter()
            .filter(|e| (m.vertices()[e.0] - Point::new(1.0, 0.0)).norm() < 1e-12)
            .map(|e| (m.vertices()[e.0] - m.vertices()[e.1]).norm())
            .fold(f64::INFINITY, f64::min);
        assert!(shortest_at_corner < 0.04, "{shortest_at_corner}");
    }

    #[test]
    fn text_round_trip() {
        let d = MixedDomain::half_disk(DirichletPart::Arc);
        let m = mesh_domain(&d, 0.2).unwrap();
        let back = TriMesh::from_text(&m.to_text()).unwrap();
        assert_eq!(back, m);
        assert!(matches!(
            TriMesh::from_text("3\n0 0\n1 0\n"),
            Err(SpectralError::MeshFormat { .. })
        ));
    }

    #[test]
    fn interpolation_reproduces_linear_fields() {
        let d = MixedDomain::half_disk(DirichletPart::Straight);
        let m = mesh_domain(&d, 0.1).unwrap();
        let values: Vec<f64> = m.vertices().iter().map(|p| 2.0 * p.re - p.im + 0.5).collect();
        let f = NodalField::new(&m, &values).unwrap();
        for z in [
            Point::new(0.1, 0.2),
            Point::new(-0.5, 0.7),
            Point::new(0.0, 0.999),
        ] {
            assert!((f.eval(z).unwrap() - (2.0 * z.re - z.im + 0.5)).abs() < 1e-3);
        }
        assert!(f.eval(Point::new(0.0, -0.5)).is_err());
    }
}
