//! Conformal maps of the unit disk `U` and the upper half-disk `U⁺`.
//!
//! Every map implements [`HolomorphicMap`]. Numerical maps are truncated
//! power series built by Theodorsen iteration onto a bounded convex target;
//! closed-form Möbius maps cover the targets whose symmetrization is
//! unbounded (half-disk, sectors).

mod mobius;
mod potential;
mod reflect;
mod series;
mod theodorsen;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::GeometryError;

pub use mobius::{half_disk_map, MobiusMap};
pub use potential::{Potential, PotentialKind, ADMISSIBILITY_RADII, ADMISSIBILITY_RAYS};
pub use reflect::{schwarz_reflect, ReflectedMap, SEAM_POINTS};
pub use series::{MapNormalization, PowerSeriesMap};
pub use theodorsen::{build_disk_map, MapTarget, MAX_ITERATIONS, MAX_NODES};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ConformalError {
    #[error("|z| = {0} lies outside the closed unit disk")]
    OutsideDisk(f64),
    #[error("derivative order {0} not supported (0, 1 or 2)")]
    Order(u8),
    #[error("f'(z) vanishes at {0}")]
    CriticalPoint(Complex64),
    #[error("boundary nodes must be a power of two ≥ 64, got {0}")]
    Nodes(usize),
    #[error("target is unbounded: {0}")]
    UnboundedTarget(String),
    #[error("Theodorsen iteration failed after {iterations} iterations; residuals {history:?}")]
    IterationFailure { iterations: usize, history: Vec<f64> },
    #[error("boundary distance {distance:.3e} exceeds tolerance {tol:.3e} at {nodes} nodes")]
    BoundaryMismatch { distance: f64, tol: f64, nodes: usize },
    #[error("map does not send (-1, 1) into the circle: deviation {0:.3e}")]
    NotOnCircle(f64),
    #[error("reflection inconsistency: derivative jump {jump:.3e} across the seam")]
    ReflectionInconsistency { jump: f64 },
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// A map holomorphic on (a neighbourhood of) the closed unit disk, or on the
/// part of it where the map is used.
pub trait HolomorphicMap: Send + Sync + std::fmt::Debug {
    fn value(&self, z: Complex64) -> Complex64;
    fn derivative(&self, z: Complex64) -> Complex64;
    fn second_derivative(&self, z: Complex64) -> Complex64;
}

/// `f`, `f′` or `f″` at `z` with `|z| ≤ 1`.
pub fn eval_map(map: &dyn HolomorphicMap, z: Complex64, order: u8) -> Result<Complex64, ConformalError> {
    if z.norm() > 1.0 + 1e-12 {
        return Err(ConformalError::OutsideDisk(z.norm()));
    }
    match order {
        0 => Ok(map.value(z)),
        1 => Ok(map.derivative(z)),
        2 => Ok(map.second_derivative(z)),
        k => Err(ConformalError::Order(k)),
    }
}

/// `Re(1 + z f″(z)/f′(z))`; positive on `U` iff `f` is a convex map.
pub fn convexity_functional(map: &dyn HolomorphicMap, z: Complex64) -> Result<f64, ConformalError> {
    if z.norm() >= 1.0 {
        return Err(ConformalError::OutsideDisk(z.norm()));
    }
    let d1 = map.derivative(z);
    if d1.norm() < 1e-300 {
        return Err(ConformalError::CriticalPoint(z));
    }
    Ok((1.0 + z * map.second_derivative(z) / d1).re)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub monotone: bool,
    pub min_increment: f64,
    /// `r·|f′(r e^{iθ})|` on the grid.
    pub profile: Vec<f64>,
}

/// Tabulates `r|f′(re^{iθ})|` on an increasing radius grid.
pub fn radial_profile_check(
    map: &dyn HolomorphicMap,
    theta: f64,
    r_grid: &[f64],
) -> Result<RadialProfile, ConformalError> {
    if r_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ConformalError::InvalidMap(
            "radius grid must be strictly increasing".to_string(),
        ));
    }
    let dir = Complex64::from_polar(1.0, theta);
    let profile: Vec<f64> = r_grid
        .iter()
        .map(|&r| r * map.derivative(dir * r).norm())
        .collect();
    let min_increment = profile
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    Ok(RadialProfile {
        monotone: min_increment >= -1e-8,
        min_increment,
        profile,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_functional_and_profile() {
        let id = MobiusMap::identity();
        let z = Complex64::new(0.3, 0.4);
        assert_eq!(eval_map(&id, z, 1).unwrap(), Complex64::new(1.0, 0.0));
        assert!((convexity_functional(&id, z).unwrap() - 1.0).abs() < 1e-15);
        let grid: Vec<f64> = (1..10).map(|k| k as f64 / 10.0).collect();
        let p = radial_profile_check(&id, 0.7, &grid).unwrap();
        assert!(p.monotone);
        for (v, r) in p.profile.iter().zip(&grid) {
            assert!((v - r).abs() < 1e-15);
        }
        assert!(matches!(
            eval_map(&id, Complex64::new(1.0, 1.0), 0),
            Err(ConformalError::OutsideDisk(_))
        ));
        assert!(matches!(eval_map(&id, z, 3), Err(ConformalError::Order(3))));
    }

    #[test]
    fn square_map_functional() {
        #[derive(Debug)]
        struct Square;
        impl HolomorphicMap for Square {
            fn value(&self, z: Complex64) -> Complex64 {
                z * z
            }
            fn derivative(&self, z: Complex64) -> Complex64 {
                2.0 * z
            }
            fn second_derivative(&self, _: Complex64) -> Complex64 {
                Complex64::new(2.0, 0.0)
            }
        }
        // 1 + z·2/(2z) = 2 for every z ≠ 0
        let v = convexity_functional(&Square, Complex64::new(0.5, 0.0)).unwrap();
        assert!((v - 2.0).abs() < 1e-15);
        assert!(matches!(
            convexity_functional(&Square, Complex64::new(0.0, 0.0)),
            Err(ConformalError::CriticalPoint(_))
        ));
    }

    #[test]
    fn half_plane_map_profile() {
        // z/(1−z) has profile r/(1−r)²
        let m = MobiusMap::new(
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(1.0, 0.0),
        )
        .unwrap();
        let grid: Vec<f64> = (1..20).map(|k| k as f64 / 20.0).collect();
        let p = radial_profile_check(&m, 0.0, &grid).unwrap();
        assert!(p.monotone);
        for (v, r) in p.profile.iter().zip(&grid) {
            assert!((v - r / (1.0 - r).powi(2)).abs() < 1e-12);
        }
        assert!(radial_profile_check(&m, 0.0, &[0.5, 0.4]).is_err());
    }
}
