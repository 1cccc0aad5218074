use num_complex::Complex64;

use super::{ConformalError, HolomorphicMap};
use crate::geometry::Circle;

/// Number of seam points checked by [`schwarz_reflect`].
pub const SEAM_POINTS: usize = 100;

/// `f̃ = f` on the closed upper half-disk and `σ_C ∘ f ∘ conj` below it.
#[derive(Debug, Clone)]
pub struct ReflectedMap<M> {
    upper: M,
    circle: Circle,
    seam_jump: f64,
}

impl<M: HolomorphicMap> ReflectedMap<M> {
    pub fn upper(&self) -> &M {
        &self.upper
    }

    pub fn circle(&self) -> Circle {
        self.circle
    }

    /// Largest derivative jump measured across `(−1, 1)` at construction.
    pub fn seam_jump(&self) -> f64 {
        self.seam_jump
    }

    /// Derivatives of the lower branch `z₀ + R²/(G − conj z₀)` with
    /// `G(z) = conj(f(conj z))`.
    fn lower(&self, z: Complex64) -> [Complex64; 3] {
        let w = z.conj();
        let g = self.upper.value(w).conj();
        let g1 = self.upper.derivative(w).conj();
        let g2 = self.upper.second_derivative(w).conj();
        let r2 = self.circle.radius * self.circle.radius;
        let q = g - self.circle.center.conj();
        [
            self.circle.center + r2 / q,
            -r2 * g1 / (q * q),
            -r2 * (g2 / (q * q) - 2.0 * g1 * g1 / (q * q * q)),
        ]
    }
}

impl<M: HolomorphicMap> HolomorphicMap for ReflectedMap<M> {
    fn value(&self, z: Complex64) -> Complex64 {
        if z.im >= 0.0 {
            self.upper.value(z)
        } else {
            self.lower(z)[0]
        }
    }

    fn derivative(&self, z: Complex64) -> Complex64 {
        if z.im >= 0.0 {
            self.upper.derivative(z)
        } else {
            self.lower(z)[1]
        }
    }

    fn second_derivative(&self, z: Complex64) -> Complex64 {
        if z.im >= 0.0 {
            self.upper.second_derivative(z)
        } else {
            self.lower(z)[2]
        }
    }
}

/// Extends `f: U⁺ → D` across `(−1, 1)` by reflection in `circle`.
///
/// Fails when `f` does not send the seam into the circle within `tol`, or
/// when the two branches' derivatives differ by more than `tol` at any of
/// [`SEAM_POINTS`] seam points.
pub fn schwarz_reflect<M: HolomorphicMap>(
    upper: M,
    circle: Circle,
    tol: f64,
) -> Result<ReflectedMap<M>, ConformalError> {
    let seam: Vec<f64> = (0..SEAM_POINTS)
        .map(|k| -0.99 + 1.98 * k as f64 / (SEAM_POINTS - 1) as f64)
        .collect();
    let deviation = seam
        .iter()
        .map(|&x| circle.distance(upper.value(Complex64::new(x, 0.0))))
        .fold(0.0, f64::max);
    if deviation > tol {
        return Err(ConformalError::NotOnCircle(deviation));
    }
    let mut map = ReflectedMap {
        upper,
        circle,
        seam_jump: 0.0,
    };
    let jump = seam
        .iter()
        .map(|&x| {
            let z = Complex64::new(x, 0.0);
            (map.upper.derivative(z) - map.lower(z)[1]).norm()
        })
        .fold(0.0, f64::max);
    if jump > tol {
        return Err(ConformalError::ReflectionInconsistency { jump });
    }
    map.seam_jump = jump;
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::MobiusMap;

    fn blaschke() -> MobiusMap {
        MobiusMap::new(
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(1.0, 0.0),
        )
        .unwrap()
    }

    #[test]
    fn mobius_extension_is_itself() {
        let f = blaschke();
        let r = schwarz_reflect(f, Circle::unit(), 1e-10).unwrap();
        for k in 0..50 {
            let z = Complex64::from_polar(0.05 + 0.9 * k as f64 / 50.0, -0.1 - 3.0 * k as f64 / 50.0);
            assert!((r.value(z) - f.value(z)).norm() < 1e-12);
            assert!((r.derivative(z) - f.derivative(z)).norm() < 1e-11);
            assert!((r.second_derivative(z) - f.second_derivative(z)).norm() < 1e-10);
        }
    }

    #[test]
    fn identity_fails_precondition() {
        let err = schwarz_reflect(MobiusMap::identity(), Circle::unit(), 1e-8).unwrap_err();
        assert!(matches!(err, ConformalError::NotOnCircle(_)));
    }
}
