//! Reflected Brownian motion in the unit ball `U_d` with killing, the
//! scaling coupling, and Monte Carlo estimators.
//!
//! Brownian motion is standard: increments have variance `dt` per
//! coordinate, so the generator is `Δ/2`. Every path draws from its own
//! ChaCha stream keyed by `(seed, path index)`, and batch reductions run in
//! path-index order, so results do not depend on the thread count.

mod coupling;
mod estimators;
mod output;
mod walk;

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::MixedDomain;

pub use coupling::{
    coupled_ordering_check, coupled_run, coupling_batch, killing_order_check, scaling_couple, CoupledSample,
    CouplingRow, CouplingSpec, CouplingSummary, CouplingTrace, OrderingCheck,
};
pub use estimators::{
    direct_survival, feynman_kac, functional_tail_estimate, survival_probability, survival_via_conformal,
    DirectSurvival, FeynmanKacEstimate, SurvivalEstimate,
};
pub use output::{write_coupling_csv, write_survival_csv, SurvivalRow};
pub use walk::{detect_killing_hyperplane, simulate_rbm, KillCheck};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum StochasticError {
    #[error("step landed at |x| = {norm:.6} > 1 + 10√dt; decrease dt (currently {dt})")]
    StepTooLarge { norm: f64, dt: f64 },
    #[error("invalid simulation config: {0}")]
    Config(String),
    #[error("invalid coupling: {0}")]
    Coupling(String),
    #[error("start point {0:?} is outside the closed unit ball")]
    StartOutside(Vec<f64>),
    #[error("zero samples requested")]
    ZeroSamples,
    #[error("potential is not admissible: {0}")]
    Inadmissible(String),
    #[error("starlikeness certificate required for the killing-order check")]
    MissingCertificate,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("map does not match the domain: boundary image {distance:.3e} away from {piece}")]
    MapMismatch { distance: f64, piece: &'static str },
}

/// Where paths are killed.
#[derive(Debug, Clone)]
pub enum KillingSet {
    None,
    /// The hyperplane `x_d = 0`; paths live in `x_d > 0`.
    Hyperplane,
    /// The killing curve γ₂ of a planar domain: paths are killed on leaving
    /// the domain.
    Curve(Arc<MixedDomain>),
}

impl KillingSet {
    /// Positive while alive; the zero level set is the killing set.
    #[inline]
    pub(crate) fn level(&self, x: &[f64]) -> f64 {
        match self {
            Self::None => f64::INFINITY,
            Self::Hyperplane => x[x.len() - 1],
            Self::Curve(d) => -d.signed_distance(crate::Point::new(x[0], x[1])).value,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub dimension: usize,
    pub dt: f64,
    pub max_time: f64,
    /// Brownian-bridge crossing correction (hyperplane killing only).
    pub bridge_correction: bool,
    pub killing: KillingSet,
}

impl SimConfig {
    pub fn new(dimension: usize, dt: f64, max_time: f64) -> Result<Self, StochasticError> {
        if dimension < 2 {
            return Err(StochasticError::Config(format!("dimension {dimension} < 2")));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(StochasticError::Config(format!("dt = {dt} must be positive")));
        }
        if !(max_time > 0.0 && max_time.is_finite()) {
            return Err(StochasticError::Config(format!(
                "max_time = {max_time} must be positive and finite"
            )));
        }
        Ok(Self {
            dimension,
            dt,
            max_time,
            bridge_correction: false,
            killing: KillingSet::Hyperplane,
        })
    }

    pub fn with_killing(mut self, killing: KillingSet) -> Result<Self, StochasticError> {
        if matches!(killing, KillingSet::Curve(_)) && self.dimension != 2 {
            return Err(StochasticError::Config(
                "curve killing needs dimension 2".to_string(),
            ));
        }
        self.killing = killing;
        Ok(self)
    }

    pub fn with_bridge(mut self, on: bool) -> Self {
        self.bridge_correction = on;
        self
    }

    pub(crate) fn steps(&self) -> usize {
        (self.max_time / self.dt).ceil() as usize
    }
}

/// Identity of a path's random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngId {
    pub seed: u64,
    pub path: u64,
}

/// The random stream of path `path` under `seed`.
pub fn path_rng(id: RngId) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(id.seed);
    rng.set_stream(id.path);
    rng
}

/// A simulated path on the grid `t_k = k·dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSample {
    pub dimension: usize,
    pub dt: f64,
    /// Row-major positions, `dimension` entries per grid point.
    pub positions: Vec<f64>,
    pub killed_at: Option<f64>,
    pub rng_id: RngId,
}

impl PathSample {
    pub fn len(&self) -> usize {
        self.positions.len() / self.dimension
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn position(&self, k: usize) -> &[f64] {
        &self.positions[k * self.dimension..(k + 1) * self.dimension]
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// Maps `f` over `0..n`, in parallel when the feature is on; output order is
/// always the index order.
pub(crate) fn par_map<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4)
            .map(|_| 0)
            .scan(path_rng(RngId { seed: 7, path: 3 }), |r, _| Some(r.random()))
            .collect();
        let b: Vec<u64> = (0..4)
            .map(|_| 0)
            .scan(path_rng(RngId { seed: 7, path: 3 }), |r, _| Some(r.random()))
            .collect();
        let c: Vec<u64> = (0..4)
            .map(|_| 0)
            .scan(path_rng(RngId { seed: 7, path: 4 }), |r, _| Some(r.random()))
            .collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn config_validation() {
        assert!(SimConfig::new(1, 1e-3, 1.0).is_err());
        assert!(SimConfig::new(2, 0.0, 1.0).is_err());
        assert!(SimConfig::new(2, 1e-3, f64::INFINITY).is_err());
        let d = Arc::new(MixedDomain::half_disk(crate::geometry::DirichletPart::Straight));
        assert!(SimConfig::new(3, 1e-3, 1.0)
            .unwrap()
            .with_killing(KillingSet::Curve(d))
            .is_err());
    }
}
