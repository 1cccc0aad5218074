use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{norm, path_rng, KillingSet, PathSample, RngId, SimConfig, StochasticError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KillCheck {
    Survived,
    /// Killed at `prev_time + fraction·dt`.
    Killed {
        fraction: f64,
    },
}

/// Kill test for one step against the hyperplane `x_d = 0`.
///
/// A sign change kills at the linearly interpolated time. Otherwise, with
/// `bridge_correction`, the step kills with the Brownian-bridge crossing
/// probability `exp(−2ab/dt)` at mid-step; one uniform is drawn only then.
pub fn detect_killing_hyperplane(
    prev: &[f64],
    next: &[f64],
    dt: f64,
    bridge_correction: bool,
    rng: &mut ChaCha8Rng,
) -> KillCheck {
    let a = prev[prev.len() - 1];
    let b = next[next.len() - 1];
    crossing(a, b, dt, bridge_correction, rng)
}

#[inline]
pub(crate) fn crossing(a: f64, b: f64, dt: f64, bridge: bool, rng: &mut ChaCha8Rng) -> KillCheck {
    if b <= 0.0 {
        return KillCheck::Killed {
            fraction: if a <= 0.0 { 0.0 } else { a / (a - b) },
        };
    }
    if bridge && a > 0.0 {
        let p = (-2.0 * a * b / dt).exp();
        if p > 0.0 && rng.random::<f64>() < p {
            return KillCheck::Killed { fraction: 0.5 };
        }
    }
    KillCheck::Survived
}

/// Euler step with specular reflection in the unit sphere.
pub(crate) struct Stepper {
    dt: f64,
    sqrt_dt: f64,
    limit: f64,
}

impl Stepper {
    pub(crate) fn new(dt: f64) -> Self {
        let sqrt_dt = dt.sqrt();
        Self {
            dt,
            sqrt_dt,
            limit: 1.0 + 10.0 * sqrt_dt,
        }
    }

    /// Advances `x` in place.
    #[inline]
    pub(crate) fn step(&self, x: &mut [f64], rng: &mut ChaCha8Rng) -> Result<(), StochasticError> {
        let mut r2 = 0.0;
        for c in x.iter_mut() {
            let g: f64 = rng.sample(StandardNormal);
            *c += self.sqrt_dt * g;
            r2 += *c * *c;
        }
        if r2 > 1.0 {
            let r = r2.sqrt();
            if r > self.limit {
                return Err(StochasticError::StepTooLarge { norm: r, dt: self.dt });
            }
            let s = (2.0 - r) / r;
            for c in x.iter_mut() {
                *c *= s;
            }
        }
        Ok(())
    }
}

/// Kill test of a step against `killing`.
#[inline]
pub(crate) fn detect(
    killing: &KillingSet,
    level_prev: f64,
    level_next: f64,
    dt: f64,
    bridge: bool,
    rng: &mut ChaCha8Rng,
) -> KillCheck {
    match killing {
        KillingSet::None => KillCheck::Survived,
        KillingSet::Hyperplane => crossing(level_prev, level_next, dt, bridge, rng),
        KillingSet::Curve(_) => crossing(level_prev, level_next, dt, false, rng),
    }
}

/// Simulates one path from `start` until it is killed or `max_time`.
pub fn simulate_rbm(start: &[f64], config: &SimConfig, rng_id: RngId) -> Result<PathSample, StochasticError> {
    if start.len() != config.dimension {
        return Err(StochasticError::Config(format!(
            "start has {} coordinates, dimension is {}",
            start.len(),
            config.dimension
        )));
    }
    if norm(start) > 1.0 + 1e-12 {
        return Err(StochasticError::StartOutside(start.to_vec()));
    }
    let mut rng = path_rng(rng_id);
    let stepper = Stepper::new(config.dt);
    let mut positions = start.to_vec();
    let mut level = config.killing.level(start);
    let mut killed_at = (level <= 0.0).then_some(0.0);
    let mut x = start.to_vec();
    if killed_at.is_none() {
        for k in 0..config.steps() {
            stepper.step(&mut x, &mut rng)?;
            positions.extend_from_slice(&x);
            let next = config.killing.level(&x);
            if let KillCheck::Killed { fraction } = detect(
                &config.killing,
                level,
                next,
                config.dt,
                config.bridge_correction,
                &mut rng,
            ) {
                killed_at = Some((k as f64 + fraction) * config.dt);
                break;
            }
            level = next;
        }
    }
    Ok(PathSample {
        dimension: config.dimension,
        dt: config.dt,
        positions,
        killed_at,
        rng_id,
    })
}
