use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::walk::{crossing, detect, KillCheck, Stepper};
use super::{norm, par_map, path_rng, KillingSet, RngId, SimConfig, StochasticError};
use crate::conformal::{HolomorphicMap, Potential};
use crate::geometry::{ArcRole, BoundaryPiece, MixedDomain};
use crate::Point;

/// A Monte Carlo probability with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurvivalEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub n: usize,
    /// Paths that reached `max_time` undecided; they count as survivors.
    pub truncated: usize,
    pub dt: f64,
    pub seed: u64,
}

impl SurvivalEstimate {
    fn from_counts(hits: usize, n: usize, truncated: usize, dt: f64, seed: u64) -> Self {
        let p = hits as f64 / n as f64;
        Self {
            estimate: p,
            stderr: (p * (1.0 - p) / n as f64).sqrt(),
            n,
            truncated,
            dt,
            seed,
        }
    }

    /// `[estimate − z·stderr, estimate + z·stderr]`.
    pub fn interval(&self, z: f64) -> (f64, f64) {
        (self.estimate - z * self.stderr, self.estimate + z * self.stderr)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeynmanKacEstimate {
    pub value: f64,
    pub stderr: f64,
    pub n: usize,
    /// Fraction of paths alive at `t`.
    pub survival: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectSurvival {
    pub estimate: SurvivalEstimate,
    /// Paths killed for entering the `2√dt` disk around a corner.
    pub corner_kills: usize,
}

fn check_start(start: &[f64], potential: &Potential, config: &SimConfig) -> Result<(), StochasticError> {
    if start.len() != config.dimension {
        return Err(StochasticError::Config(format!(
            "start has {} coordinates, dimension is {}",
            start.len(),
            config.dimension
        )));
    }
    if let Some(d) = potential.dimension() {
        if d != config.dimension {
            return Err(StochasticError::Config(format!(
                "potential lives in dimension {d}, simulation in {}",
                config.dimension
            )));
        }
    }
    if norm(start) > 1.0 + 1e-12 {
        return Err(StochasticError::StartOutside(start.to_vec()));
    }
    Ok(())
}

enum Tail {
    Exceeded,
    Killed,
    Truncated,
}

fn tail_path(
    start: &[f64],
    potential: &Potential,
    t: f64,
    config: &SimConfig,
    id: RngId,
) -> Result<Tail, StochasticError> {
    if t < 0.0 {
        return Ok(Tail::Exceeded);
    }
    let mut level = config.killing.level(start);
    if level <= 0.0 {
        return Ok(Tail::Killed);
    }
    let mut rng = path_rng(id);
    let stepper = Stepper::new(config.dt);
    let dt = config.dt;
    let mut x = start.to_vec();
    let mut prev = start.to_vec();
    let mut v_prev = potential.eval(start);
    let mut integral = 0.0;
    for _ in 0..config.steps() {
        prev.copy_from_slice(&x);
        stepper.step(&mut x, &mut rng)?;
        let next = config.killing.level(&x);
        match detect(
            &config.killing,
            level,
            next,
            dt,
            config.bridge_correction,
            &mut rng,
        ) {
            KillCheck::Killed { fraction } => {
                let xk: Vec<f64> = prev.iter().zip(&x).map(|(p, q)| p + fraction * (q - p)).collect();
                integral += 0.5 * fraction * dt * (v_prev + potential.eval(&xk));
                return Ok(if integral > t {
                    Tail::Exceeded
                } else {
                    Tail::Killed
                });
            }
            KillCheck::Survived => {
                let v = potential.eval(&x);
                integral += 0.5 * dt * (v_prev + v);
                if integral > t {
                    return Ok(Tail::Exceeded);
                }
                v_prev = v;
                level = next;
            }
        }
    }
    Ok(Tail::Truncated)
}

/// Estimates `P{∫₀^τ V(B_s) ds > t}` for reflected Brownian motion from
/// `start`, killed per `config`.
pub fn functional_tail_estimate(
    start: &[f64],
    potential: &Potential,
    t: f64,
    n: usize,
    config: &SimConfig,
    seed: u64,
) -> Result<SurvivalEstimate, StochasticError> {
    if n == 0 {
        return Err(StochasticError::ZeroSamples);
    }
    check_start(start, potential, config)?;
    if !potential.is_admissible() {
        return Err(StochasticError::Inadmissible(
            potential.warning().unwrap_or("flag not set").to_string(),
        ));
    }
    let outcomes = par_map(n, |i| {
        tail_path(start, potential, t, config, RngId { seed, path: i as u64 })
    });
    let (mut hits, mut truncated) = (0, 0);
    for o in outcomes {
        match o? {
            Tail::Exceeded => hits += 1,
            Tail::Truncated => {
                hits += 1;
                truncated += 1;
            }
            Tail::Killed => {}
        }
    }
    Ok(SurvivalEstimate::from_counts(hits, n, truncated, config.dt, seed))
}

/// Checks that `map` sends the diameter `(−1, 1)` onto γ₂ and the upper
/// semicircle onto γ₁.
fn check_map_matches(domain: &MixedDomain, map: &dyn HolomorphicMap) -> Result<(), StochasticError> {
    let tol = 1e-3 * domain.diameter().max(1.0);
    let worst = |piece: BoundaryPiece, pts: &mut dyn Iterator<Item = Point>| {
        pts.map(|w| domain.curve(piece).distance(map.value(w)))
            .fold(0.0_f64, f64::max)
    };
    let d2 = worst(
        BoundaryPiece::Gamma2,
        &mut (1..20).map(|k| Point::new(-0.95 + 0.1 * k as f64 - 0.05, 0.0)),
    );
    if !(d2 <= tol) {
        return Err(StochasticError::MapMismatch {
            distance: d2,
            piece: "γ₂",
        });
    }
    let d1 = worst(
        BoundaryPiece::Gamma1,
        &mut (1..20).map(|k| Point::from_polar(1.0, std::f64::consts::PI * k as f64 / 20.0)),
    );
    if !(d1 <= tol) {
        return Err(StochasticError::MapMismatch {
            distance: d1,
            piece: "γ₁",
        });
    }
    Ok(())
}

/// Estimates `u(f(w)) = P^w{∫₀^τ |f′(B_s)|² ds > t}` with `B` reflected in
/// the unit disk and killed on the real axis. `u(z)` is the probability
/// that Brownian motion in `D` from `z` survives past `t`.
pub fn survival_via_conformal(
    domain: &MixedDomain,
    map: Arc<dyn HolomorphicMap>,
    w: Point,
    t: f64,
    n: usize,
    config: &SimConfig,
    seed: u64,
) -> Result<SurvivalEstimate, StochasticError> {
    if domain.arc_role() != ArcRole::Gamma2IsArc {
        return Err(StochasticError::Precondition(
            "the conformal route needs γ₂ to be the arc".to_string(),
        ));
    }
    if !(w.im > 0.0 && w.norm() < 1.0) {
        return Err(StochasticError::StartOutside(vec![w.re, w.im]));
    }
    check_map_matches(domain, map.as_ref())?;
    let config = SimConfig {
        dimension: 2,
        killing: KillingSet::Hyperplane,
        ..config.clone()
    };
    let potential = Potential::from_map(map);
    functional_tail_estimate(&[w.re, w.im], &potential, t, n, &config, seed)
}

enum Direct {
    Survived,
    Killed,
    Corner,
}

/// Simulates Brownian motion in `D` itself: specular reflection on γ₁,
/// killing on γ₂, and killing within `2√dt` of either corner.
///
/// With `bridge_correction`, a step that stays inside is also killed with
/// the crossing probability of the tangent half-plane at γ₂.
pub fn direct_survival(
    domain: &MixedDomain,
    z: Point,
    t: f64,
    n: usize,
    config: &SimConfig,
    seed: u64,
) -> Result<DirectSurvival, StochasticError> {
    if n == 0 {
        return Err(StochasticError::ZeroSamples);
    }
    if config.dimension != 2 {
        return Err(StochasticError::Config("direct simulation is planar".to_string()));
    }
    if domain.signed_distance(z).value >= 0.0 {
        return Err(StochasticError::StartOutside(vec![z.re, z.im]));
    }
    let dt = config.dt;
    let steps = (t / dt).round() as usize;
    let corner_radius = 2.0 * dt.sqrt();
    let corners = [domain.corner0(), domain.corner1()];
    let sqrt_dt = dt.sqrt();
    let run = |i: usize| -> Direct {
        let mut rng = path_rng(RngId { seed, path: i as u64 });
        let mut x = z;
        // distance to γ₂ before the step, for the bridge
        let mut a = domain.gamma2().distance(x);
        for _ in 0..steps {
            let g1: f64 = rng.sample(rand_distr::StandardNormal);
            let g2: f64 = rng.sample(rand_distr::StandardNormal);
            x += Point::new(g1, g2) * sqrt_dt;
            for _ in 0..4 {
                let sd = domain.signed_distance(x);
                if sd.value <= 0.0 {
                    break;
                }
                if sd.piece == BoundaryPiece::Gamma2 {
                    return Direct::Killed;
                }
                x = match sd.normal {
                    Some(nrm) => x - nrm * (2.0 * sd.value),
                    None => 2.0 * sd.nearest - x,
                };
            }
            if domain.signed_distance(x).value > 0.0 {
                x = domain.signed_distance(x).nearest;
            }
            if corners.iter().any(|c| (x - c).norm() < corner_radius) {
                return Direct::Corner;
            }
            let b = domain.gamma2().distance(x);
            if config.bridge_correction && crossing(a, b, dt, true, &mut rng) != KillCheck::Survived {
                return Direct::Killed;
            }
            a = b;
        }
        Direct::Survived
    };
    let outcomes = par_map(n, run);
    let mut alive = 0;
    let mut corner_kills = 0;
    for o in outcomes {
        match o {
            Direct::Survived => alive += 1,
            Direct::Corner => corner_kills += 1,
            Direct::Killed => {}
        }
    }
    Ok(DirectSurvival {
        estimate: SurvivalEstimate::from_counts(alive, n, 0, dt, seed),
        corner_kills,
    })
}

/// Estimates `P{τ > t}` on the grid: a path survives if it is alive after
/// `round(t/dt)` steps.
pub fn survival_probability(
    start: &[f64],
    t: f64,
    n: usize,
    config: &SimConfig,
    seed: u64,
) -> Result<SurvivalEstimate, StochasticError> {
    if n == 0 {
        return Err(StochasticError::ZeroSamples);
    }
    check_start(start, &Potential::constant(1.0), config)?;
    let dt = config.dt;
    let steps = (t / dt).round() as usize;
    let alive = par_map(n, |i| -> Result<bool, StochasticError> {
        let mut level = config.killing.level(start);
        if level <= 0.0 {
            return Ok(false);
        }
        let mut rng = path_rng(RngId { seed, path: i as u64 });
        let stepper = Stepper::new(dt);
        let mut x = start.to_vec();
        for _ in 0..steps {
            stepper.step(&mut x, &mut rng)?;
            let next = config.killing.level(&x);
            if detect(
                &config.killing,
                level,
                next,
                dt,
                config.bridge_correction,
                &mut rng,
            ) != KillCheck::Survived
            {
                return Ok(false);
            }
            level = next;
        }
        Ok(true)
    });
    let mut hits = 0;
    for a in alive {
        if a? {
            hits += 1;
        }
    }
    Ok(SurvivalEstimate::from_counts(hits, n, 0, dt, seed))
}

/// Estimates `E[exp(−∫₀ᵗ V(B_s) ds); τ > t]`; killed paths contribute 0.
pub fn feynman_kac(
    start: &[f64],
    potential: &Potential,
    t: f64,
    n: usize,
    config: &SimConfig,
    seed: u64,
) -> Result<FeynmanKacEstimate, StochasticError> {
    if n == 0 {
        return Err(StochasticError::ZeroSamples);
    }
    if !(t > 0.0) {
        return Err(StochasticError::Config(format!("t = {t} must be positive")));
    }
    check_start(start, potential, config)?;
    let dt = config.dt;
    let steps = ((t / dt).round() as usize).max(1);
    let values = par_map(n, |i| -> Result<f64, StochasticError> {
        let mut level = config.killing.level(start);
        if level <= 0.0 {
            return Ok(0.0);
        }
        let mut rng = path_rng(RngId { seed, path: i as u64 });
        let stepper = Stepper::new(dt);
        let mut x = start.to_vec();
        let mut v_prev = potential.eval(start);
        let mut integral = 0.0;
        for _ in 0..steps {
            stepper.step(&mut x, &mut rng)?;
            let next = config.killing.level(&x);
            if detect(
                &config.killing,
                level,
                next,
                dt,
                config.bridge_correction,
                &mut rng,
            ) != KillCheck::Survived
            {
                return Ok(0.0);
            }
            let v = potential.eval(&x);
            integral += 0.5 * dt * (v_prev + v);
            v_prev = v;
            level = next;
        }
        Ok((-integral).exp())
    });
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut alive = 0;
    for v in values {
        let v = v?;
        sum += v;
        sum_sq += v * v;
        if v > 0.0 {
            alive += 1;
        }
    }
    let nf = n as f64;
    let mean = sum / nf;
    let var = if n > 1 {
        ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(FeynmanKacEstimate {
        value: mean,
        stderr: (var / nf).sqrt(),
        n,
        survival: alive as f64 / nf,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::{half_disk_map, MobiusMap};
    use crate::geometry::DirichletPart;

    fn cfg(dt: f64) -> SimConfig {
        SimConfig::new(2, dt, 20.0).unwrap().with_bridge(true)
    }

    #[test]
    fn zero_threshold_gives_one() {
        let e = functional_tail_estimate(&[0.1, 0.5], &Potential::constant(1.0), 0.0, 200, &cfg(1e-3), 1)
            .unwrap();
        assert_eq!(e.estimate, 1.0);
        assert_eq!(e.stderr, 0.0);
    }

    #[test]
    fn huge_threshold_gives_zero() {
        let e = functional_tail_estimate(&[0.1, 0.5], &Potential::constant(1.0), 15.0, 300, &cfg(1e-3), 1)
            .unwrap();
        assert!(e.estimate <= 3.0 * e.stderr.max(1.0 / 300.0));
    }

    #[test]
    fn zero_samples_is_an_error() {
        assert_eq!(
            functional_tail_estimate(&[0.1, 0.5], &Potential::constant(1.0), 0.1, 0, &cfg(1e-3), 1),
            Err(StochasticError::ZeroSamples)
        );
    }

    #[test]
    fn estimates_are_deterministic() {
        let v = Potential::constant(1.0);
        let a = functional_tail_estimate(&[0.0, 0.4], &v, 0.1, 200, &cfg(1e-3), 9).unwrap();
        let b = functional_tail_estimate(&[0.0, 0.4], &v, 0.1, 200, &cfg(1e-3), 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn feynman_kac_factorizes_for_constants() {
        let c = 0.7;
        let t = 0.2;
        let s = feynman_kac(&[0.0, 0.5], &Potential::constant(0.0), t, 2000, &cfg(1e-3), 4).unwrap();
        let f = feynman_kac(&[0.0, 0.5], &Potential::constant(c), t, 2000, &cfg(1e-3), 4).unwrap();
        assert!((s.value - s.survival).abs() < 1e-12);
        assert!((f.value - (-c * t).exp() * s.survival).abs() < 1e-9);
    }

    #[test]
    fn identity_map_reduces_to_half_disk_exit() {
        let d = MixedDomain::half_disk(DirichletPart::Straight);
        // identity: diameter → γ₂ requires the killing piece to be straight
        let err = survival_via_conformal(
            &d,
            Arc::new(MobiusMap::identity()),
            Point::new(0.0, 0.5),
            0.1,
            10,
            &cfg(1e-3),
            0,
        );
        assert!(matches!(err, Err(StochasticError::Precondition(_))));
        let swapped = MixedDomain::half_disk(DirichletPart::Arc);
        let err = survival_via_conformal(
            &swapped,
            Arc::new(MobiusMap::identity()),
            Point::new(0.0, 0.5),
            0.1,
            10,
            &cfg(1e-3),
            0,
        );
        assert!(matches!(err, Err(StochasticError::MapMismatch { .. })));
        assert!(survival_via_conformal(
            &swapped,
            Arc::new(half_disk_map()),
            Point::new(0.0, 0.5),
            0.1,
            10,
            &cfg(1e-3),
            0,
        )
        .is_ok());
    }

    #[test]
    fn direct_simulation_stays_inside() {
        let d = MixedDomain::half_disk(DirichletPart::Arc);
        let r = direct_survival(&d, Point::new(0.0, 0.3), 0.05, 200, &cfg(1e-3), 3).unwrap();
        assert!(r.estimate.estimate > 0.5);
        assert!(direct_survival(&d, Point::new(0.0, 1.5), 0.05, 10, &cfg(1e-3), 3).is_err());
    }
}
