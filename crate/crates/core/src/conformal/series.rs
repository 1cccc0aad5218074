use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::theodorsen::MapTarget;
use super::{ConformalError, HolomorphicMap};

/// Normalization of a disk map: `g(0)` and `arg g′(0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapNormalization {
    pub center: Complex64,
    pub derivative_arg: f64,
}

/// `g(z) = Σ c_k z^k` on the closed unit disk.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeriesMap {
    coefficients: Vec<Complex64>,
    d1: Vec<Complex64>,
    d2: Vec<Complex64>,
    normalization: MapNormalization,
    boundary_distance: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct MapFile {
    coefficients: Vec<[f64; 2]>,
    normalization: MapNormalization,
    #[serde(default)]
    boundary_distance: Option<f64>,
}

impl PowerSeriesMap {
    pub fn from_coefficients(coefficients: Vec<Complex64>) -> Result<Self, ConformalError> {
        if coefficients.len() < 2 || coefficients[1].norm() == 0.0 {
            return Err(ConformalError::InvalidMap("c₁ must be nonzero".to_string()));
        }
        if coefficients
            .iter()
            .any(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(ConformalError::InvalidMap("non-finite coefficient".to_string()));
        }
        let d1 = coefficients
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * k as f64)
            .collect();
        let d2 = coefficients
            .iter()
            .enumerate()
            .skip(2)
            .map(|(k, c)| c * (k * (k - 1)) as f64)
            .collect();
        let normalization = MapNormalization {
            center: coefficients[0],
            derivative_arg: coefficients[1].arg(),
        };
        Ok(Self {
            coefficients,
            d1,
            d2,
            normalization,
            boundary_distance: None,
        })
    }

    pub(crate) fn with_boundary_distance(mut self, distance: f64) -> Self {
        self.boundary_distance = Some(distance);
        self
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// Truncation order `N` (index of the last stored coefficient).
    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn normalization(&self) -> MapNormalization {
        self.normalization
    }

    /// Measured `sup_θ dist(g(e^{iθ}), ∂D*)` when the map was built or
    /// verified against a target.
    pub fn boundary_distance(&self) -> Option<f64> {
        self.boundary_distance
    }

    /// `|c_N| / max_k |c_k|` over the last nonzero coefficient.
    pub fn tail_ratio(&self) -> f64 {
        let max = self.coefficients.iter().map(|c| c.norm()).fold(0.0, f64::max);
        self.coefficients.last().map_or(0.0, |c| c.norm() / max)
    }

    /// Sup over `samples` boundary points of the distance to the target.
    pub fn measure_boundary_distance(&self, target: &MapTarget, samples: usize) -> f64 {
        (0..samples)
            .map(|k| {
                let z = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / samples as f64);
                target.boundary_distance(self.value(z))
            })
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Result<String, serde_json::Error> {
        serde_json::to_string_pretty(&MapFile {
            coefficients: self.coefficients.iter().map(|c| [c.re, c.im]).collect(),
            normalization: self.normalization,
            boundary_distance: self.boundary_distance,
        })
    }

    /// Parses a serialized map and re-checks the boundary-distance invariant
    /// against `target` before returning it.
    pub fn from_json_verified(json: &str, target: &MapTarget, tol: f64) -> Result<Self, ConformalError> {
        let file: MapFile = serde_json::from_str(json)
            .map_err(|e| ConformalError::InvalidMap(format!("unreadable map file: {e}")))?;
        let coefficients = file
            .coefficients
            .iter()
            .map(|c| Complex64::new(c[0], c[1]))
            .collect();
        let map = Self::from_coefficients(coefficients)?;
        let distance = map.measure_boundary_distance(target, 4 * map.coefficients.len().max(256));
        if distance >= tol {
            return Err(ConformalError::BoundaryMismatch {
                distance,
                tol,
                nodes: 2 * map.order(),
            });
        }
        Ok(map.with_boundary_distance(distance))
    }
}

fn horner(coefficients: &[Complex64], z: Complex64) -> Complex64 {
    coefficients
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

impl HolomorphicMap for PowerSeriesMap {
    fn value(&self, z: Complex64) -> Complex64 {
        horner(&self.coefficients, z)
    }

    fn derivative(&self, z: Complex64) -> Complex64 {
        horner(&self.d1, z)
    }

    fn second_derivative(&self, z: Complex64) -> Complex64 {
        horner(&self.d2, z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::eval_map;

    #[test]
    fn affine_series_derivatives() {
        let m = PowerSeriesMap::from_coefficients(vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)])
            .unwrap();
        let z = Complex64::new(0.3, -0.2);
        assert_eq!(eval_map(&m, z, 0).unwrap(), Complex64::new(1.6, -0.4));
        assert_eq!(eval_map(&m, z, 1).unwrap(), Complex64::new(2.0, 0.0));
        assert_eq!(eval_map(&m, z, 2).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn json_round_trip_is_verified() {
        let m = PowerSeriesMap::from_coefficients(vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)])
            .unwrap();
        let json = m.to_json().unwrap();
        let target = MapTarget::Disk {
            center: Complex64::new(1.0, 0.0),
            radius: 2.0,
        };
        let back = PowerSeriesMap::from_json_verified(&json, &target, 1e-10).unwrap();
        assert_eq!(back.coefficients(), m.coefficients());
        let wrong = MapTarget::Disk {
            center: Complex64::new(0.0, 0.0),
            radius: 2.0,
        };
        assert!(matches!(
            PowerSeriesMap::from_json_verified(&json, &wrong, 1e-10),
            Err(ConformalError::BoundaryMismatch { .. })
        ));
    }
}
