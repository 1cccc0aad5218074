use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::series::PowerSeriesMap;
use super::ConformalError;
use crate::geometry::{Point, SymmetrizedDomain};

pub const MAX_ITERATIONS: usize = 200;
pub const MAX_NODES: usize = 4096;

const ITERATION_TOL: f64 = 1e-14;
const COEFFICIENT_FLOOR: f64 = 1e-14;

/// A bounded domain, starlike about its normalization center, onto which
/// the unit disk is mapped.
#[derive(Debug, Clone)]
pub enum MapTarget {
    Disk {
        center: Point,
        radius: f64,
    },
    /// Axis-aligned ellipse with semi-axes `a` (horizontal) and `b`.
    Ellipse {
        center: Point,
        a: f64,
        b: f64,
    },
    /// Bounded symmetrization `D*`; the map is normalized at the midpoint of
    /// γ₂ with `g′(0)` tangent to the inversion circle and `g(U⁺) = D`.
    Symmetrized(Box<SymmetrizedDomain>),
}

impl MapTarget {
    /// `(g(0), arg g′(0))`.
    pub fn normalization(&self) -> Result<(Point, f64), ConformalError> {
        match self {
            Self::Disk { center, .. } | Self::Ellipse { center, .. } => Ok((*center, 0.0)),
            Self::Symmetrized(s) => {
                let d = s.original();
                let p = d.gamma2().point(0.5);
                let outward = d.signed_distance(p).normal.ok_or_else(|| {
                    ConformalError::InvalidMap("γ₂ midpoint is not a smooth point".to_string())
                })?;
                // i·g′(0) must point into D
                let dir = Complex64::new(0.0, 1.0) * outward;
                Ok((p, dir.arg()))
            }
        }
    }

    /// Distance from `center` to the boundary along `e^{iφ}`.
    pub fn radial(&self, center: Point, phi: f64) -> Result<f64, ConformalError> {
        let dir = Complex64::from_polar(1.0, phi);
        match self {
            Self::Disk { center: c, radius } => {
                let oc = center - c;
                let b = oc.re * dir.re + oc.im * dir.im;
                let q = oc.norm_sqr() - radius * radius;
                Ok(-b + (b * b - q).sqrt())
            }
            Self::Ellipse { center: c, a, b } => {
                let o = center - c;
                let (ox, oy) = (o.re / a, o.im / b);
                let (dx, dy) = (dir.re / a, dir.im / b);
                let qa = dx * dx + dy * dy;
                let qb = ox * dx + oy * dy;
                let qc = ox * ox + oy * oy - 1.0;
                Ok((-qb + (qb * qb - qa * qc).sqrt()) / qa)
            }
            Self::Symmetrized(s) => {
                let exact = s
                    .original()
                    .gamma1()
                    .ray_hits(center, dir)
                    .into_iter()
                    .chain(
                        s.mirror_boundary()
                            .into_iter()
                            .flat_map(|m| m.ray_hits(center, dir)),
                    )
                    .filter(|&t| t > 1e-12)
                    .fold(f64::INFINITY, f64::min);
                if exact.is_finite() {
                    return Ok(exact);
                }
                polygon_ray(s.full_boundary(), center, dir).ok_or_else(|| {
                    ConformalError::InvalidMap(format!("ray at angle {phi} misses the target"))
                })
            }
        }
    }

    pub fn boundary_distance(&self, z: Point) -> f64 {
        match self {
            Self::Disk { center, radius } => ((z - center).norm() - radius).abs(),
            Self::Ellipse { center, a, b } => ellipse_distance(z - center, *a, *b),
            Self::Symmetrized(s) => {
                let g1 = s.original().gamma1().distance(z);
                match s.mirror_boundary() {
                    Some(m) => g1.min(m.distance(z)),
                    None => g1,
                }
            }
        }
    }

    fn check_bounded(&self) -> Result<(), ConformalError> {
        match self {
            Self::Symmetrized(s) if !s.is_bounded() => Err(ConformalError::UnboundedTarget(
                "symmetrized domain was clipped".to_string(),
            )),
            Self::Disk { radius, .. } if !(*radius > 0.0) => Err(ConformalError::InvalidMap(
                "disk radius must be positive".to_string(),
            )),
            Self::Ellipse { a, b, .. } if !(*a > 0.0 && *b > 0.0) => Err(ConformalError::InvalidMap(
                "ellipse axes must be positive".to_string(),
            )),
            _ => Ok(()),
        }
    }
}

fn polygon_ray(polygon: &[Point], origin: Point, dir: Point) -> Option<f64> {
    let n = polygon.len();
    (0..n)
        .filter_map(|k| {
            let a = polygon[k];
            let e = polygon[(k + 1) % n] - a;
            let denom = dir.re * e.im - dir.im * e.re;
            if denom.abs() < 1e-300 {
                return None;
            }
            let ao = a - origin;
            let s = (ao.re * e.im - ao.im * e.re) / denom;
            let u = (ao.re * dir.im - ao.im * dir.re) / denom;
            (s > 0.0 && (0.0..=1.0).contains(&u)).then_some(s)
        })
        .reduce(f64::min)
}

/// Distance from `p` to the ellipse `x²/a² + y²/b² = 1`, by Newton on the
/// foot-point parameter seeded from a coarse scan.
fn ellipse_distance(p: Point, a: f64, b: f64) -> f64 {
    let point = |t: f64| Point::new(a * t.cos(), b * t.sin());
    let mut t = (0..256)
        .map(|k| 2.0 * PI * k as f64 / 256.0)
        .min_by(|&s, &u| (point(s) - p).norm().total_cmp(&(point(u) - p).norm()))
        .unwrap();
    for _ in 0..50 {
        let (s, c) = t.sin_cos();
        let e = point(t) - p;
        let d = Point::new(-a * s, b * c);
        let dd = Point::new(-a * c, -b * s);
        let g = e.re * d.re + e.im * d.im;
        let h = d.norm_sqr() + e.re * dd.re + e.im * dd.im;
        if h.abs() < 1e-300 {
            break;
        }
        let step = g / h;
        t -= step;
        if step.abs() < 1e-16 {
            break;
        }
    }
    (point(t) - p).norm()
}

/// Builds `g: U → target` by Theodorsen iteration, doubling the node count
/// from `boundary_nodes` up to [`MAX_NODES`] until the boundary distance is
/// below `tol`.
pub fn build_disk_map(
    target: &MapTarget,
    boundary_nodes: usize,
    tol: f64,
) -> Result<PowerSeriesMap, ConformalError> {
    if boundary_nodes < 64 || !boundary_nodes.is_power_of_two() {
        return Err(ConformalError::Nodes(boundary_nodes));
    }
    target.check_bounded()?;
    let (center, beta) = target.normalization()?;
    let mut nodes = boundary_nodes;
    let mut planner = FftPlanner::new();
    loop {
        let coefficients = theodorsen(target, center, beta, nodes, &mut planner)?;
        let map = PowerSeriesMap::from_coefficients(coefficients)?;
        let distance = map.measure_boundary_distance(target, 4 * nodes);
        if distance < tol {
            return Ok(map.with_boundary_distance(distance));
        }
        if nodes >= MAX_NODES {
            return Err(ConformalError::BoundaryMismatch { distance, tol, nodes });
        }
        nodes *= 2;
    }
}

/// One Theodorsen solve at `n` nodes: `ψ ← K[ln ρ(θ + ψ)] + β`, then the
/// Taylor coefficients of `g` from its boundary values.
fn theodorsen(
    target: &MapTarget,
    center: Point,
    beta: f64,
    n: usize,
    planner: &mut FftPlanner<f64>,
) -> Result<Vec<Complex64>, ConformalError> {
    let fft = planner.plan_fft_forward(n);
    let ifft = planner.plan_fft_inverse(n);
    let theta: Vec<f64> = (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect();
    let mut psi = vec![beta; n];
    let mut history = Vec::new();
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for _ in 0..MAX_ITERATIONS {
        for j in 0..n {
            buf[j] = Complex64::new(target.radial(center, theta[j] + psi[j])?.ln(), 0.0);
        }
        fft.process(&mut buf);
        // conjugate function: multiply mode k by −i·sign(k)
        buf[0] = Complex64::new(0.0, 0.0);
        buf[n / 2] = Complex64::new(0.0, 0.0);
        for (k, c) in buf.iter_mut().enumerate().skip(1) {
            if k < n / 2 {
                *c *= Complex64::new(0.0, -1.0);
            } else if k > n / 2 {
                *c *= Complex64::new(0.0, 1.0);
            }
        }
        ifft.process(&mut buf);
        let mut residual: f64 = 0.0;
        for j in 0..n {
            let next = buf[j].re / n as f64 + beta;
            residual = residual.max((next - psi[j]).abs());
            psi[j] = next;
        }
        if !residual.is_finite() {
            history.push(residual);
            return Err(ConformalError::IterationFailure {
                iterations: history.len(),
                history,
            });
        }
        history.push(residual);
        if residual < ITERATION_TOL || stalled(&history) {
            let mut g: Vec<Complex64> = (0..n)
                .map(|j| {
                    let phi = theta[j] + psi[j];
                    target
                        .radial(center, phi)
                        .map(|r| center + Complex64::from_polar(r, phi))
                })
                .collect::<Result<_, _>>()?;
            fft.process(&mut g);
            let mut coefficients: Vec<Complex64> = g[..=n / 2].iter().map(|c| c / n as f64).collect();
            let max = coefficients.iter().map(|c| c.norm()).fold(0.0, f64::max);
            for c in coefficients.iter_mut() {
                if c.norm() < COEFFICIENT_FLOOR * max {
                    *c = Complex64::new(0.0, 0.0);
                }
            }
            while coefficients.len() > 2 && coefficients.last().is_some_and(|c| c.norm() == 0.0) {
                coefficients.pop();
            }
            return Ok(coefficients);
        }
    }
    Err(ConformalError::IterationFailure {
        iterations: history.len(),
        history,
    })
}

/// Residual at rounding level and no longer decreasing.
fn stalled(history: &[f64]) -> bool {
    let k = history.len();
    k > 8 && history[k - 1] < 1e-11 && history[k - 1] >= 0.5 * history[k - 6]
}
