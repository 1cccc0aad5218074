use serde::{Deserialize, Serialize};

use super::walk::Stepper;
use super::{norm, par_map, path_rng, KillingSet, PathSample, RngId, SimConfig, StochasticError};
use crate::conformal::Potential;
use crate::geometry::StarlikeCertificate;

/// Direction `ζ` (with `ζ_d > 0`) and radii `0 < r₁ ≤ r₂ < 1/‖ζ‖`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingSpec {
    zeta: Vec<f64>,
    r1: f64,
    r2: f64,
}

impl CouplingSpec {
    /// `r₁ = r₂` is accepted: the coupling is then the identity.
    pub fn new(zeta: Vec<f64>, r1: f64, r2: f64) -> Result<Self, StochasticError> {
        let n = norm(&zeta);
        if zeta.len() < 2 || !(n > 0.0) || !(zeta[zeta.len() - 1] > 0.0) {
            return Err(StochasticError::Coupling(format!(
                "direction {zeta:?} must be nonzero with positive last coordinate"
            )));
        }
        if !(r1 > 0.0 && r1 <= r2 && r2 * n < 1.0) {
            return Err(StochasticError::Coupling(format!(
                "need 0 < r1 ≤ r2 < 1/‖ζ‖ = {}, got r1 = {r1}, r2 = {r2}",
                1.0 / n
            )));
        }
        Ok(Self { zeta, r1, r2 })
    }

    pub fn zeta(&self) -> &[f64] {
        &self.zeta
    }

    pub fn r1(&self) -> f64 {
        self.r1
    }

    pub fn r2(&self) -> f64 {
        self.r2
    }

    pub fn base_start(&self) -> Vec<f64> {
        self.zeta.iter().map(|c| self.r1 * c).collect()
    }

    pub fn coupled_start(&self) -> Vec<f64> {
        self.zeta.iter().map(|c| self.r2 * c).collect()
    }

    /// `r₁/r₂`, the floor of the running maximum.
    pub fn floor(&self) -> f64 {
        self.r1 / self.r2
    }
}

/// Full grids of one coupled realization.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CouplingTrace {
    pub dt: f64,
    /// Base path `B` on `t_k = k·dt`, row-major.
    pub base: Vec<f64>,
    /// `M_{t_k}`.
    pub m: Vec<f64>,
    /// `A_{t_k}`.
    pub a: Vec<f64>,
    /// `α_{s_j}` on the coupled grid `s_j = j·dt`.
    pub alpha: Vec<f64>,
    /// `B̃_{s_j}`, row-major.
    pub coupled: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoupledSample {
    pub tau: Option<f64>,
    pub tau_tilde: Option<f64>,
    pub alpha_tau_tilde: Option<f64>,
    /// `∫₀^τ V(B_s) ds`.
    pub functional_base: f64,
    /// `∫₀^τ̃ V(B̃_s) ds`.
    pub functional_coupled: f64,
    /// Set when `max_time` ran out before both paths were killed.
    pub truncated: bool,
    pub trace: Option<CouplingTrace>,
}

/// Streams the base path and builds `M`, `A`, `α` and `B̃` on the fly.
struct Coupler<'a> {
    dt: f64,
    killing: &'a KillingSet,
    potential: &'a Potential,
    k: usize,
    b_prev: Vec<f64>,
    y_prev: Vec<f64>,
    y: Vec<f64>,
    m_prev: f64,
    a_prev: f64,
    level_prev: f64,
    v_prev: f64,
    tau: Option<f64>,
    functional_base: f64,
    j: usize,
    bt_prev: Vec<f64>,
    bt: Vec<f64>,
    level_t_prev: f64,
    vt_prev: f64,
    alpha_prev: f64,
    tau_tilde: Option<f64>,
    alpha_tau_tilde: Option<f64>,
    functional_coupled: f64,
    trace: Option<CouplingTrace>,
}

impl<'a> Coupler<'a> {
    fn new(
        start: &[f64],
        floor: f64,
        dt: f64,
        killing: &'a KillingSet,
        potential: &'a Potential,
        record: bool,
    ) -> Self {
        let m0 = floor.max(norm(start));
        let y0: Vec<f64> = start.iter().map(|c| c / m0).collect();
        let level = killing.level(start);
        let level_t = killing.level(&y0);
        let trace = record.then(|| CouplingTrace {
            dt,
            base: start.to_vec(),
            m: vec![m0],
            a: vec![0.0],
            alpha: vec![0.0],
            coupled: y0.clone(),
        });
        Self {
            dt,
            killing,
            potential,
            k: 0,
            b_prev: start.to_vec(),
            y: y0.clone(),
            y_prev: y0.clone(),
            m_prev: m0,
            a_prev: 0.0,
            level_prev: level,
            v_prev: potential.eval(start),
            tau: (level <= 0.0).then_some(0.0),
            functional_base: 0.0,
            j: 1,
            bt_prev: y0.clone(),
            bt: y0.clone(),
            level_t_prev: level_t,
            vt_prev: potential.eval(&y0),
            alpha_prev: 0.0,
            tau_tilde: (level_t <= 0.0).then_some(0.0),
            alpha_tau_tilde: (level_t <= 0.0).then_some(0.0),
            functional_coupled: 0.0,
            trace,
        }
    }

    fn done(&self) -> bool {
        self.tau.is_some() && self.tau_tilde.is_some()
    }

    fn push(&mut self, b: &[f64]) {
        let dt = self.dt;
        let t_prev = self.k as f64 * dt;
        self.k += 1;
        let m = self.m_prev.max(norm(b));
        let a = self.a_prev + 0.5 * dt * (1.0 / (self.m_prev * self.m_prev) + 1.0 / (m * m));
        for (yi, bi) in self.y.iter_mut().zip(b) {
            *yi = bi / m;
        }

        if self.tau.is_none() {
            let level = self.killing.level(b);
            if level <= 0.0 {
                let f = self.level_prev / (self.level_prev - level);
                let x: Vec<f64> = self.b_prev.iter().zip(b).map(|(p, q)| p + f * (q - p)).collect();
                self.functional_base += 0.5 * f * dt * (self.v_prev + self.potential.eval(&x));
                self.tau = Some(t_prev + f * dt);
            } else {
                let v = self.potential.eval(b);
                self.functional_base += 0.5 * dt * (self.v_prev + v);
                self.v_prev = v;
                self.level_prev = level;
            }
        }

        while self.tau_tilde.is_none() && self.j as f64 * dt <= a {
            let s = self.j as f64 * dt;
            let f = (s - self.a_prev) / (a - self.a_prev);
            let alpha = t_prev + f * dt;
            for ((bt, p), q) in self.bt.iter_mut().zip(&self.y_prev).zip(&self.y) {
                *bt = p + f * (q - p);
            }
            let level = self.killing.level(&self.bt);
            if level <= 0.0 {
                let g = self.level_t_prev / (self.level_t_prev - level);
                let x: Vec<f64> = self
                    .bt_prev
                    .iter()
                    .zip(&self.bt)
                    .map(|(p, q)| p + g * (q - p))
                    .collect();
                self.functional_coupled += 0.5 * g * dt * (self.vt_prev + self.potential.eval(&x));
                self.tau_tilde = Some(s - dt + g * dt);
                self.alpha_tau_tilde = Some(self.alpha_prev + g * (alpha - self.alpha_prev));
            } else {
                let v = self.potential.eval(&self.bt);
                self.functional_coupled += 0.5 * dt * (self.vt_prev + v);
                self.vt_prev = v;
                self.level_t_prev = level;
            }
            if let Some(tr) = self.trace.as_mut() {
                tr.alpha.push(alpha);
                tr.coupled.extend_from_slice(&self.bt);
            }
            self.bt_prev.copy_from_slice(&self.bt);
            self.alpha_prev = alpha;
            self.j += 1;
        }

        if let Some(tr) = self.trace.as_mut() {
            tr.base.extend_from_slice(b);
            tr.m.push(m);
            tr.a.push(a);
        }
        self.b_prev.copy_from_slice(b);
        self.y_prev.copy_from_slice(&self.y);
        self.m_prev = m;
        self.a_prev = a;
    }

    fn finish(self) -> CoupledSample {
        let truncated = !self.done();
        CoupledSample {
            tau: self.tau,
            tau_tilde: self.tau_tilde,
            alpha_tau_tilde: self.alpha_tau_tilde,
            functional_base: self.functional_base,
            functional_coupled: self.functional_coupled,
            truncated,
            trace: self.trace,
        }
    }
}

/// Couples a recorded, unkilled base path started at `r₁ζ`.
pub fn scaling_couple(
    base: &PathSample,
    spec: &CouplingSpec,
    potential: &Potential,
    killing: &KillingSet,
) -> Result<CoupledSample, StochasticError> {
    if base.killed_at.is_some() {
        return Err(StochasticError::Precondition(
            "base path must be simulated without killing".to_string(),
        ));
    }
    let start = spec.base_start();
    if base.dimension != start.len()
        || base
            .position(0)
            .iter()
            .zip(&start)
            .any(|(a, b)| (a - b).abs() > 1e-12)
    {
        return Err(StochasticError::Precondition(format!(
            "base path starts at {:?}, expected r1·ζ = {start:?}",
            base.position(0)
        )));
    }
    let mut c = Coupler::new(&start, spec.floor(), base.dt, killing, potential, true);
    for k in 1..base.len() {
        c.push(base.position(k));
        if c.done() {
            break;
        }
    }
    Ok(c.finish())
}

/// Simulates a base path from `r₁ζ` and couples it on the fly, stopping
/// once both paths are killed. The bridge correction is not used here.
pub fn coupled_run(
    spec: &CouplingSpec,
    config: &SimConfig,
    potential: &Potential,
    rng_id: RngId,
    record: bool,
) -> Result<CoupledSample, StochasticError> {
    let start = spec.base_start();
    if start.len() != config.dimension {
        return Err(StochasticError::Config(format!(
            "ζ has {} coordinates, dimension is {}",
            start.len(),
            config.dimension
        )));
    }
    let mut rng = path_rng(rng_id);
    let stepper = Stepper::new(config.dt);
    let mut c = Coupler::new(
        &start,
        spec.floor(),
        config.dt,
        &config.killing,
        potential,
        record,
    );
    let mut x = start;
    for _ in 0..config.steps() {
        if c.done() {
            break;
        }
        stepper.step(&mut x, &mut rng)?;
        c.push(&x);
    }
    Ok(c.finish())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderingCheck {
    pub holds: bool,
    /// `functional_coupled − functional_base`.
    pub slack: f64,
}

/// `∫₀^τ V(B) ≤ ∫₀^τ̃ V(B̃) + tol`.
pub fn coupled_ordering_check(sample: &CoupledSample, tol: f64) -> OrderingCheck {
    let slack = sample.functional_coupled - sample.functional_base;
    OrderingCheck {
        holds: slack >= -tol,
        slack,
    }
}

/// `τ ≤ α(τ̃) + tol` and `α(τ̃) ≤ τ̃ + tol`. Refuses to run without a
/// starlikeness certificate for the complement of the domain.
pub fn killing_order_check(
    sample: &CoupledSample,
    tol: f64,
    certificate: Option<&StarlikeCertificate>,
) -> Result<bool, StochasticError> {
    if certificate.is_none() {
        return Err(StochasticError::MissingCertificate);
    }
    Ok(match (sample.tau, sample.alpha_tau_tilde, sample.tau_tilde) {
        (Some(tau), Some(alpha), Some(tau_tilde)) => tau <= alpha + tol && alpha <= tau_tilde + tol,
        _ => false,
    })
}

/// One line of the coupled-path diagnostics CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingRow {
    pub path_index: u64,
    pub tau: Option<f64>,
    pub tau_tilde: Option<f64>,
    pub alpha_tau_tilde: Option<f64>,
    pub functional_base: f64,
    pub functional_coupled: f64,
    pub ordering_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingSummary {
    pub n: usize,
    pub tol: f64,
    pub ordering_violations: usize,
    /// `None` when no starlikeness certificate was supplied.
    pub killing_order_violations: Option<usize>,
    pub truncated: usize,
    pub rows: Vec<CouplingRow>,
}

impl CouplingSummary {
    pub fn ordering_violation_fraction(&self) -> f64 {
        self.ordering_violations as f64 / self.n as f64
    }

    pub fn killing_violation_fraction(&self) -> Option<f64> {
        self.killing_order_violations.map(|v| v as f64 / self.n as f64)
    }
}

/// Runs `n` coupled paths with tolerance `5√dt`. Truncated paths count as
/// violations of both checks.
pub fn coupling_batch(
    spec: &CouplingSpec,
    config: &SimConfig,
    potential: &Potential,
    n: usize,
    seed: u64,
    certificate: Option<&StarlikeCertificate>,
) -> Result<CouplingSummary, StochasticError> {
    if n == 0 {
        return Err(StochasticError::ZeroSamples);
    }
    if !potential.is_admissible() {
        return Err(StochasticError::Inadmissible(
            potential.warning().unwrap_or("flag not set").to_string(),
        ));
    }
    for start in [spec.base_start(), spec.coupled_start()] {
        if config.killing.level(&start) <= 0.0 {
            return Err(StochasticError::Precondition(format!(
                "start {start:?} is on or beyond the killing set"
            )));
        }
    }
    let tol = 5.0 * config.dt.sqrt();
    let samples = par_map(n, |i| {
        coupled_run(spec, config, potential, RngId { seed, path: i as u64 }, false)
    });
    let mut rows = Vec::with_capacity(n);
    let mut ordering_violations = 0;
    let mut killing_violations = 0;
    let mut truncated = 0;
    for (i, s) in samples.into_iter().enumerate() {
        let s = s?;
        let ordering = coupled_ordering_check(&s, tol).holds && !s.truncated;
        if !ordering {
            ordering_violations += 1;
        }
        if certificate.is_some() && !(killing_order_check(&s, tol, certificate)? && !s.truncated) {
            killing_violations += 1;
        }
        if s.truncated {
            truncated += 1;
        }
        rows.push(CouplingRow {
            path_index: i as u64,
            tau: s.tau,
            tau_tilde: s.tau_tilde,
            alpha_tau_tilde: s.alpha_tau_tilde,
            functional_base: s.functional_base,
            functional_coupled: s.functional_coupled,
            ordering_holds: ordering,
        });
    }
    Ok(CouplingSummary {
        n,
        tol,
        ordering_violations,
        killing_order_violations: certificate.map(|_| killing_violations),
        truncated,
        rows,
    })
}
