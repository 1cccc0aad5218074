use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::HolomorphicMap;

/// Rays used by the admissibility check.
pub const ADMISSIBILITY_RAYS: usize = 32;
/// Radii per ray used by the admissibility check.
pub const ADMISSIBILITY_RADII: usize = 64;

type Field = dyn Fn(&[f64]) -> f64 + Send + Sync;

#[derive(Clone)]
pub enum PotentialKind {
    Constant(f64),
    /// `V(x) = |f′(x₁ + i x₂)|²` (planar only).
    Conformal(Arc<dyn HolomorphicMap>),
    Custom {
        name: String,
        field: Arc<Field>,
    },
}

impl fmt::Debug for PotentialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(c) => write!(f, "Constant({c})"),
            Self::Conformal(m) => write!(f, "Conformal({m:?})"),
            Self::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

/// A positive potential `V` on the closed upper half-ball with the sampled
/// verdict on whether `r²V(rζ)` is nondecreasing in `r`.
#[derive(Debug, Clone)]
pub struct Potential {
    kind: PotentialKind,
    dimension: Option<usize>,
    admissible: bool,
    strict: bool,
    warning: Option<String>,
}

impl Potential {
    pub fn constant(value: f64) -> Self {
        let positive = value > 0.0 && value.is_finite();
        Self {
            kind: PotentialKind::Constant(value),
            dimension: None,
            admissible: positive,
            strict: positive,
            warning: (!positive).then(|| format!("constant potential {value} is not positive")),
        }
    }

    /// `V = |f′|²`; admissibility is verified by sampling.
    pub fn from_map(map: Arc<dyn HolomorphicMap>) -> Self {
        Self::verified(PotentialKind::Conformal(map), Some(2))
    }

    /// An arbitrary field on `dimension`-space; admissibility is verified by
    /// sampling.
    pub fn from_fn(
        name: &str,
        dimension: usize,
        field: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::verified(
            PotentialKind::Custom {
                name: name.to_string(),
                field: Arc::new(field),
            },
            Some(dimension),
        )
    }

    fn verified(kind: PotentialKind, dimension: Option<usize>) -> Self {
        let mut p = Self {
            kind,
            dimension,
            admissible: false,
            strict: false,
            warning: None,
        };
        let (admissible, strict, warning) = p.check_rays(dimension.unwrap_or(2));
        p.admissible = admissible;
        p.strict = strict;
        p.warning = warning;
        p
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    pub fn dimension(&self) -> Option<usize> {
        self.dimension
    }

    pub fn is_admissible(&self) -> bool {
        self.admissible
    }

    /// `r²V(rζ)` strictly increasing on every sampled ray.
    pub fn is_strict(&self) -> bool {
        self.strict
    }

    /// Why the admissibility flag was cleared, if it was.
    pub fn warning(&self) -> Option<&str> {
        self.warning.as_deref()
    }

    pub fn is_constant(&self) -> Option<f64> {
        match self.kind {
            PotentialKind::Constant(c) => Some(c),
            _ => None,
        }
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        match &self.kind {
            PotentialKind::Constant(c) => *c,
            PotentialKind::Conformal(m) => m.derivative(Complex64::new(x[0], x[1])).norm_sqr(),
            PotentialKind::Custom { field, .. } => field(x),
        }
    }

    fn check_rays(&self, dimension: usize) -> (bool, bool, Option<String>) {
        let mut strict = true;
        for zeta in hemisphere_rays(dimension, ADMISSIBILITY_RAYS) {
            let profile: Vec<f64> = (1..=ADMISSIBILITY_RADII)
                .map(|k| {
                    let r = k as f64 / ADMISSIBILITY_RADII as f64;
                    let x: Vec<f64> = zeta.iter().map(|c| r * c).collect();
                    r * r * self.eval(&x)
                })
                .collect();
            if let Some(bad) = profile.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
                return (false, false, Some(format!("V is not positive and finite: {bad}")));
            }
            let scale = profile.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            for (k, w) in profile.windows(2).enumerate() {
                let inc = w[1] - w[0];
                if inc < -1e-12 * scale {
                    return (
                        false,
                        false,
                        Some(format!(
                            "r²V(rζ) decreases by {:.3e} at r = {:.4} along ζ = {zeta:?}",
                            -inc,
                            (k + 1) as f64 / ADMISSIBILITY_RADII as f64
                        )),
                    );
                }
                if inc <= 0.0 {
                    strict = false;
                }
            }
        }
        (true, strict, None)
    }
}

/// Deterministic unit directions with positive last coordinate.
pub(crate) fn hemisphere_rays(dimension: usize, count: usize) -> Vec<Vec<f64>> {
    match dimension {
        2 => (0..count)
            .map(|j| {
                let t = std::f64::consts::PI * (j as f64 + 0.5) / count as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        _ => {
            // Fibonacci points on the upper hemisphere of S², padded with
            // zeros in higher dimensions and the last coordinate kept positive.
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|j| {
                    let z = (j as f64 + 0.5) / count as f64;
                    let rho = (1.0 - z * z).sqrt();
                    let phi = golden * j as f64;
                    let mut v = vec![0.0; dimension];
                    v[0] = rho * phi.cos();
                    v[1] = rho * phi.sin();
                    v[dimension - 1] = z;
                    v
                })
                .collect()
        }
    }
}
