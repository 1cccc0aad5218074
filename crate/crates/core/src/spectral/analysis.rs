use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::mesh::{NodalField, TriMesh};
use super::solve::EigenPair;
use super::SpectralError;
use crate::conformal::HolomorphicMap;
use crate::geometry::{ArcRole, DirichletPart, MixedDomain};
use crate::special::{bessel_j, bessel_j_prime_zero, bessel_j_zero};
use crate::stochastic::SurvivalEstimate;
use crate::Point;

/// Mixed problems with separable closed-form ground states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum ReferenceCase {
    /// Upper half-disk, Neumann on the arc, Dirichlet on the diameter.
    HalfDiskNeumannArc,
    /// Upper half-disk, Dirichlet on the arc, Neumann on the diameter.
    HalfDiskDirichletArc,
    /// Sector `|arg z − π/2| < half_angle` of the unit disk, Neumann on the
    /// arc, Dirichlet on the radii.
    Sector { half_angle: f64 },
}

/// A closed-form ground state `ψ₁(r, θ) = J_ν(k r)·Θ(θ)`, scaled to
/// maximum 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceEigen {
    pub case: ReferenceCase,
    pub mu1: f64,
    /// Bessel order.
    pub nu: f64,
    /// Radial wavenumber `√μ₁`.
    pub k: f64,
    scale: f64,
}

pub fn reference_eigen(case: ReferenceCase) -> Result<ReferenceEigen, SpectralError> {
    let (nu, k) = match case {
        ReferenceCase::HalfDiskNeumannArc => (1.0, bessel_j_prime_zero(1.0, 1)),
        ReferenceCase::HalfDiskDirichletArc => (0.0, bessel_j_zero(0.0, 1)),
        ReferenceCase::Sector { half_angle } => {
            if !(half_angle > 0.0 && half_angle <= FRAC_PI_2) {
                return Err(SpectralError::Unsupported(format!(
                    "sector half angle {half_angle}"
                )));
            }
            let nu = PI / (2.0 * half_angle);
            (nu, bessel_j_prime_zero(nu, 1))
        }
    };
    let k = k.ok_or_else(|| SpectralError::Unsupported(format!("no Bessel root for {case:?}")))?;
    let mut r = ReferenceEigen {
        case,
        mu1: k * k,
        nu,
        k,
        scale: 1.0,
    };
    r.scale = 1.0 / r.psi(r.maximizer());
    Ok(r)
}

impl ReferenceEigen {
    pub fn domain(&self) -> MixedDomain {
        match self.case {
            ReferenceCase::HalfDiskNeumannArc => MixedDomain::half_disk(DirichletPart::Straight),
            ReferenceCase::HalfDiskDirichletArc => MixedDomain::half_disk(DirichletPart::Arc),
            ReferenceCase::Sector { half_angle } => MixedDomain::sector(half_angle, DirichletPart::Straight)
                .expect("half angle validated on construction"),
        }
    }

    /// Where `ψ₁` attains its maximum.
    pub fn maximizer(&self) -> Point {
        match self.case {
            ReferenceCase::HalfDiskDirichletArc => Point::new(0.0, 0.0),
            _ => Point::new(0.0, 1.0),
        }
    }

    pub fn psi(&self, z: Point) -> f64 {
        let (r, th) = (z.norm(), z.arg());
        let angular = match self.case {
            ReferenceCase::HalfDiskNeumannArc => th.sin(),
            ReferenceCase::HalfDiskDirichletArc => 1.0,
            ReferenceCase::Sector { half_angle } => (self.nu * (th - (FRAC_PI_2 - half_angle))).sin(),
        };
        self.scale * bessel_j(self.nu, self.k * r) * angular
    }
}

/// Location of the maximum of a nodal field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hotspot {
    /// Vertex carrying the largest nodal value.
    pub vertex: usize,
    /// Refined maximizer.
    pub argmax: Point,
    pub max_value: f64,
    pub dist_to_gamma1: f64,
}

/// Largest vertex of `ψ₁`, refined by a least-squares quadratic over its
/// vertex star. A refined point outside `D` is pulled back to the nearest
/// boundary point; a fit without an interior maximum keeps the vertex.
pub fn hotspot_locate(pair: &EigenPair, mesh: &TriMesh, domain: &MixedDomain) -> Hotspot {
    let psi = &pair.psi1;
    let (vertex, &max_value) = psi
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty mesh");
    let p0 = mesh.vertices()[vertex];
    let mut star: Vec<usize> = vec![vertex];
    let mut ring = vec![vertex];
    while star.len() < 10 && !ring.is_empty() {
        let mut next = Vec::new();
        for t in mesh.triangles() {
            if t.iter().any(|v| ring.contains(v)) {
                for &v in t {
                    if !star.contains(&v) {
                        star.push(v);
                        next.push(v);
                    }
                }
            }
        }
        ring = next;
    }
    let radius = star
        .iter()
        .map(|&v| (mesh.vertices()[v] - p0).norm())
        .fold(0.0, f64::max);
    let argmax = fit_quadratic_max(mesh, psi, &star, p0)
        .filter(|d| d.norm() <= radius)
        .map(|d| p0 + d)
        .map(|p| {
            let sd = domain.signed_distance(p);
            if sd.value > 0.0 {
                sd.nearest
            } else {
                p
            }
        })
        .unwrap_or(p0);
    Hotspot {
        vertex,
        argmax,
        max_value,
        dist_to_gamma1: domain.gamma1().distance(argmax),
    }
}

/// Offset of the stationary point of the least-squares quadratic fit, when
/// the fit has a strict local maximum.
fn fit_quadratic_max(mesh: &TriMesh, values: &[f64], star: &[usize], p0: Point) -> Option<Point> {
    if star.len() < 6 {
        return None;
    }
    let scale = star
        .iter()
        .map(|&v| (mesh.vertices()[v] - p0).norm())
        .fold(0.0, f64::max);
    let mut ata = [[0.0; 6]; 6];
    let mut atb = [0.0; 6];
    for &v in star {
        let d = (mesh.vertices()[v] - p0) / scale;
        let row = [1.0, d.re, d.im, d.re * d.re, d.re * d.im, d.im * d.im];
        for i in 0..6 {
            atb[i] += row[i] * values[v];
            for j in 0..6 {
                ata[i][j] += row[i] * row[j];
            }
        }
    }
    let c = solve_dense(ata, atb)?;
    let (b, cc, d, e, f) = (c[1], c[2], c[3], c[4], c[5]);
    // Hessian [[2d, e], [e, 2f]] must be negative definite
    let det = 4.0 * d * f - e * e;
    if !(d < 0.0 && det > 0.0) {
        return None;
    }
    let x = (-b * 2.0 * f + cc * e) / det;
    let y = (-cc * 2.0 * d + b * e) / det;
    Some(Point::new(x, y) * scale)
}

fn solve_dense<const N: usize>(mut a: [[f64; N]; N], mut b: [f64; N]) -> Option<[f64; N]> {
    for col in 0..N {
        let piv = (col..N).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..N {
            let f = a[r][col] / a[col][col];
            for k in col..N {
                a[r][k] -= f * a[col][k];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = [0.0; N];
    for r in (0..N).rev() {
        let s: f64 = (r + 1..N).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RayKind {
    /// `γ_θ = f({r e^{iθ} : 0 ≤ r ≤ 1})` for a conformal map `f` of `U⁺`.
    HyperbolicGammaTheta,
    /// The part of the radius at angle `θ` from the arc's center inside `D`.
    EuclideanRTheta,
}

/// Samples of one curve of a family, ordered toward γ₁.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayCurve {
    pub kind: RayKind,
    pub theta: f64,
    pub samples: Vec<Point>,
}

impl RayCurve {
    /// `f(r e^{iθ})` for `r = 0, …, 1`.
    pub fn hyperbolic(map: &dyn HolomorphicMap, theta: f64, samples: usize) -> Self {
        let n = samples.max(2);
        Self {
            kind: RayKind::HyperbolicGammaTheta,
            theta,
            samples: (0..n)
                .map(|k| map.value(Point::from_polar(k as f64 / (n - 1) as f64, theta)))
                .collect(),
        }
    }

    /// The radius from the center of the domain's arc circle at angle
    /// `theta`, clipped to `D` and ordered so that it ends on γ₁.
    pub fn euclidean(domain: &MixedDomain, theta: f64, samples: usize) -> Result<Self, SpectralError> {
        let circle = domain.arc().circle();
        let (c, big_r) = (circle.center, circle.radius);
        let dir = Point::from_polar(1.0, theta);
        let inside = |r: f64| domain.signed_distance(c + dir * r).value <= 1e-12;
        if !inside(big_r) {
            return Err(SpectralError::Precondition(format!(
                "the radius at angle {theta} does not reach the arc inside the domain"
            )));
        }
        // walk inward from the arc to the last point of the closure
        let probes = 4096;
        let mut lo = 0.0;
        for k in (0..probes).rev() {
            let r = big_r * k as f64 / probes as f64;
            if !inside(r) {
                let (mut a, mut b) = (r, big_r * (k + 1) as f64 / probes as f64);
                for _ in 0..60 {
                    let m = 0.5 * (a + b);
                    if inside(m) {
                        b = m;
                    } else {
                        a = m;
                    }
                }
                lo = b;
                break;
            }
        }
        let n = samples.max(2);
        let mut pts: Vec<Point> = (0..n)
            .map(|k| c + dir * (lo + (big_r - lo) * k as f64 / (n - 1) as f64))
            .collect();
        if domain.arc_role() == ArcRole::Gamma2IsArc {
            pts.reverse();
        }
        let last = *pts.last().unwrap();
        let tol = 1e-9 * domain.diameter();
        if domain.gamma1().distance(last) > tol {
            return Err(SpectralError::Precondition(format!(
                "radius at angle {theta} ends {last}, off γ₁"
            )));
        }
        Ok(Self {
            kind: RayKind::EuclideanRTheta,
            theta,
            samples: pts,
        })
    }

    /// `count` euclidean radii at angles evenly spread over the arc.
    pub fn euclidean_family(
        domain: &MixedDomain,
        count: usize,
        samples: usize,
    ) -> Result<Vec<Self>, SpectralError> {
        let arc = domain.arc();
        (0..count)
            .map(|j| {
                let theta = arc.start_angle() + arc.sweep() * (j as f64 + 0.5) / count as f64;
                Self::euclidean(domain, theta, samples)
            })
            .collect()
    }

    /// `count` hyperbolic curves at `θ_j = π(j + ½)/count`.
    pub fn hyperbolic_family(map: &dyn HolomorphicMap, count: usize, samples: usize) -> Vec<Self> {
        (0..count)
            .map(|j| Self::hyperbolic(map, PI * (j as f64 + 0.5) / count as f64, samples))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Monotonicity {
    pub violations: usize,
    /// Smallest increment between consecutive samples (0 for one sample).
    pub min_increment: f64,
}

/// Counts decreases of the interpolated field along the curve larger than
/// `1e−8` times the range of the nodal values.
pub fn monotonicity_along_curve(field: &NodalField, curve: &RayCurve) -> Result<Monotonicity, SpectralError> {
    let values: Vec<f64> = curve
        .samples
        .iter()
        .map(|z| field.eval(*z))
        .collect::<Result<_, _>>()?;
    let (lo, hi) = field
        .values()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(*v), b.max(*v))
        });
    // the absolute floor absorbs interpolation round-off on flat fields
    let tol = (1e-8 * (hi - lo)).max(1e-13 * hi.abs().max(lo.abs()));
    let mut violations = 0;
    let mut min_increment = f64::INFINITY;
    for w in values.windows(2) {
        let inc = w[1] - w[0];
        min_increment = min_increment.min(inc);
        if inc < -tol {
            violations += 1;
        }
    }
    Ok(Monotonicity {
        violations,
        min_increment: if min_increment.is_finite() {
            min_increment
        } else {
            0.0
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeDeviation {
    pub z: Point,
    pub predicted: f64,
    pub estimate: f64,
    pub stderr: f64,
    /// `|estimate − predicted| / stderr`.
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub max_deviation: f64,
    /// `exp(−(μ₂ − μ₁)t)`.
    pub gap_factor: f64,
    pub probes: Vec<ProbeDeviation>,
}

/// Compares Monte Carlo survival probabilities `P^z{τ_D > t}` with the
/// leading eigenfunction term `exp(−μ₁t/2)·ψ₁(z)·∫ψ₁`.
///
/// Brownian motion here has generator `Δ/2`, hence the factor `1/2` in the
/// exponent. The spectral-gap guard is `exp(−(μ₂ − μ₁)t) < 0.05`.
pub fn expansion_crosscheck(
    mesh: &TriMesh,
    pair: &EigenPair,
    probes: &[(Point, SurvivalEstimate)],
    t: f64,
) -> Result<CrossCheck, SpectralError> {
    if !(t > 0.0) {
        return Err(SpectralError::Precondition(format!("t = {t} must be positive")));
    }
    let mu2 = pair
        .mu2
        .ok_or_else(|| SpectralError::Precondition("second eigenvalue unavailable".to_string()))?;
    let gap_factor = (-(mu2 - pair.mu1) * t).exp();
    if gap_factor >= 0.05 {
        return Err(SpectralError::SpectralGap { factor: gap_factor });
    }
    let field = NodalField::new(mesh, &pair.psi1)?;
    let mass = mesh.integrate(&pair.psi1);
    let decay = (-0.5 * pair.mu1 * t).exp();
    let mut out = Vec::with_capacity(probes.len());
    for (z, est) in probes {
        let predicted = decay * field.eval(*z)? * mass;
        let score = (est.estimate - predicted).abs() / est.stderr;
        out.push(ProbeDeviation {
            z: *z,
            predicted,
            estimate: est.estimate,
            stderr: est.stderr,
            score,
        });
    }
    Ok(CrossCheck {
        max_deviation: out.iter().map(|p| p.score).fold(0.0, f64::max),
        gap_factor,
        probes: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::half_disk_map;
    use crate::spectral::mesh_domain;

    #[test]
    fn reference_values() {
        let cases = [
            (ReferenceCase::HalfDiskNeumannArc, 3.38996),
            (ReferenceCase::HalfDiskDirichletArc, 5.78319),
            (ReferenceCase::Sector { half_angle: PI / 4.0 }, 9.32836),
        ];
        for (case, mu) in cases {
            let r = reference_eigen(case).unwrap();
            assert!((r.mu1 - mu).abs() < 1e-5, "{case:?}: {}", r.mu1);
            assert!((r.psi(r.maximizer()) - 1.0).abs() < 1e-12);
        }
        assert!(reference_eigen(ReferenceCase::Sector { half_angle: 2.0 }).is_err());
    }

    #[test]
    fn reference_psi_vanishes_on_dirichlet_piece() {
        let r = reference_eigen(ReferenceCase::Sector { half_angle: PI / 4.0 }).unwrap();
        for s in [0.2, 0.5, 0.9] {
            assert!(r.psi(Point::from_polar(s, PI / 4.0)).abs() < 1e-12);
            assert!(r.psi(Point::from_polar(s, 3.0 * PI / 4.0)).abs() < 1e-12);
        }
        let r = reference_eigen(ReferenceCase::HalfDiskDirichletArc).unwrap();
        assert!(r.psi(Point::from_polar(1.0, 1.0)).abs() < 1e-12);
    }

    #[test]
    fn euclidean_radii_end_on_gamma1() {
        let d = MixedDomain::half_disk(DirichletPart::Arc);
        let fam = RayCurve::euclidean_family(&d, 16, 20).unwrap();
        assert_eq!(fam.len(), 16);
        for c in &fam {
            assert!(c.samples.last().unwrap().norm() < 1e-9);
            assert!((c.samples[0].norm() - 1.0).abs() < 1e-12);
        }
        let d = MixedDomain::half_disk(DirichletPart::Straight);
        for c in RayCurve::euclidean_family(&d, 4, 20).unwrap() {
            assert!((c.samples.last().unwrap().norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn hyperbolic_curves_of_half_disk_map() {
        let f = half_disk_map();
        for c in RayCurve::hyperbolic_family(&f, 8, 30) {
            assert!((c.samples[0] - Point::new(0.0, 1.0)).norm() < 1e-12);
            assert!(c.samples.last().unwrap().im.abs() < 1e-12);
            assert!(c.samples.windows(2).all(|w| w[1].norm() < w[0].norm()));
        }
    }

    #[test]
    fn constant_field_has_no_violations() {
        let d = MixedDomain::half_disk(DirichletPart::Straight);
        let m = mesh_domain(&d, 0.1).unwrap();
        let ones = vec![1.0; m.vertices().len()];
        let f = NodalField::new(&m, &ones).unwrap();
        let c = RayCurve::euclidean(&d, 1.0, 30).unwrap();
        let r = monotonicity_along_curve(&f, &c).unwrap();
        assert_eq!(r.violations, 0);
        assert!(r.min_increment.abs() < 1e-13);
    }

    #[test]
    fn crosscheck_guards() {
        let d = MixedDomain::half_disk(DirichletPart::Straight);
        let m = mesh_domain(&d, 0.2).unwrap();
        let pair = EigenPair {
            mu1: 3.39,
            psi1: vec![0.0; m.vertices().len()],
            residual: 0.0,
            mu2: Some(9.33),
            iterations: 1,
        };
        assert!(matches!(
            expansion_crosscheck(&m, &pair, &[], 0.0),
            Err(SpectralError::Precondition(_))
        ));
        assert!(matches!(
            expansion_crosscheck(&m, &pair, &[], 0.1),
            Err(SpectralError::SpectralGap { .. })
        ));
        assert!(expansion_crosscheck(&m, &pair, &[], 1.0).is_ok());
    }
}
