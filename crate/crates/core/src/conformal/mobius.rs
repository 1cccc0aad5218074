use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ConformalError, HolomorphicMap};

/// `(az + b)/(cz + d)` with `ad − bc ≠ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobiusMap {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
}

impl MobiusMap {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self, ConformalError> {
        let det = a * d - b * c;
        if det.norm() < 1e-14 * (a.norm() + b.norm()) * (c.norm() + d.norm()) || det.norm() == 0.0 {
            return Err(ConformalError::InvalidMap("degenerate Möbius map".to_string()));
        }
        Ok(Self { a, b, c, d })
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self {
            a: one,
            b: zero,
            c: zero,
            d: one,
        }
    }

    /// The pole `−d/c`, if any.
    pub fn pole(&self) -> Option<Complex64> {
        (self.c.norm() > 0.0).then(|| -self.d / self.c)
    }

    pub fn coefficients(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }
}

impl HolomorphicMap for MobiusMap {
    fn value(&self, z: Complex64) -> Complex64 {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    fn derivative(&self, z: Complex64) -> Complex64 {
        let q = self.c * z + self.d;
        (self.a * self.d - self.b * self.c) / (q * q)
    }

    fn second_derivative(&self, z: Complex64) -> Complex64 {
        let q = self.c * z + self.d;
        -2.0 * self.c * (self.a * self.d - self.b * self.c) / (q * q * q)
    }
}

/// `f(z) = (i − z)/(1 − iz)`: maps `U⁺` onto the upper half-disk with
/// `f((−1, 1))` the upper semicircle, `f(0) = i` and the unit semicircle of
/// `∂U⁺` onto the diameter. Its pole `−i` lies outside `closure(U⁺)`.
pub fn half_disk_map() -> MobiusMap {
    MobiusMap {
        a: Complex64::new(-1.0, 0.0),
        b: Complex64::new(0.0, 1.0),
        c: Complex64::new(0.0, -1.0),
        d: Complex64::new(1.0, 0.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn half_disk_map_boundary_correspondence() {
        let f = half_disk_map();
        let i = Complex64::new(0.0, 1.0);
        assert!((f.value(Complex64::new(0.0, 0.0)) - i).norm() < 1e-15);
        for k in 0..=20 {
            let x = -0.99 + 1.98 * k as f64 / 20.0;
            let w = f.value(Complex64::new(x, 0.0));
            assert!((w.norm() - 1.0).abs() < 1e-14);
            assert!(w.im > 0.0);
            let zeta = Complex64::from_polar(1.0, PI * (k as f64 + 0.5) / 21.0);
            assert!(f.value(zeta).im.abs() < 1e-14);
        }
        assert!(f.value(Complex64::new(0.1, 0.5)).norm() < 1.0);
        assert_eq!(f.pole(), Some(Complex64::new(0.0, -1.0)));
    }

    #[test]
    fn derivatives_match_difference_quotients() {
        let f = half_disk_map();
        let z = Complex64::new(0.2, 0.3);
        let h = 1e-5;
        let fd = (f.value(z + h) - f.value(z - h)) / (2.0 * h);
        assert!((fd - f.derivative(z)).norm() < 1e-9);
        let fdd = (f.derivative(z + h) - f.derivative(z - h)) / (2.0 * h);
        assert!((fdd - f.second_derivative(z)).norm() < 1e-8);
        let v = f.derivative(z).norm_sqr();
        let q = (Complex64::new(1.0, 0.0) - Complex64::new(0.0, 1.0) * z).norm();
        assert!((v - 4.0 / q.powi(4)).abs() < 1e-13);
    }
}
