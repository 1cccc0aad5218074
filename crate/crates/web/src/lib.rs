//! Browser bindings for the laboratory.
//!
//! Every export takes plain numbers or a JSON domain description and
//! returns a JSON string; errors surface as thrown JS strings.

use hotspots::conformal::Potential;
use hotspots::geometry::{is_convex, symmetrize_domain, ArcRole, DomainSpec, MixedDomain, GEOM_TOL};
use hotspots::spectral::{ground_state, hotspot_locate};
use hotspots::stochastic::{coupled_ordering_check, coupled_run, CouplingSpec, KillingSet, RngId, SimConfig};
use hotspots::Point;
use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Boundary samples per curve sent to the page.
const OUTLINE_SAMPLES: usize = 128;
const MIN_H: f64 = 0.02;

fn xy(points: &[Point]) -> Vec<[f64; 2]> {
    points.iter().map(|p| [p.re, p.im]).collect()
}

fn domain(spec: &str) -> Result<MixedDomain, String> {
    let spec: DomainSpec = serde_json::from_str(spec).map_err(|e| format!("domain JSON: {e}"))?;
    spec.build().map_err(|e| e.to_string())
}

fn to_json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

/// Outline of `D`, its mirror image across the circle of γ₂ and the
/// convexity verdict for `D*`.
pub fn symmetrize_json(spec: &str) -> Result<String, String> {
    let d = domain(spec)?;
    if d.arc_role() != ArcRole::Gamma2IsArc {
        return Err("symmetrization needs γ₂ to be the circular arc".into());
    }
    let sym = symmetrize_domain(&d).map_err(|e| e.to_string())?;
    let (a0, a1) = d.corner_angles().map_err(|e| e.to_string())?;
    let convex = is_convex(sym.full_boundary(), GEOM_TOL)
        .map_err(|e| e.to_string())?
        .is_convex();
    to_json(&json!({
        "gamma1": xy(&d.gamma1().samples(OUTLINE_SAMPLES)),
        "gamma2": xy(&d.gamma2().samples(OUTLINE_SAMPLES)),
        "mirror": xy(sym.mirror_samples()),
        "bounded": sym.is_bounded(),
        "convex": convex,
        "corner_angles": [a0, a1],
    }))
}

/// Ground state on a mesh of size `h` (at least 0.02 to keep the page
/// responsive) together with the located hot spot.
pub fn eigen_field_json(spec: &str, h: f64) -> Result<String, String> {
    if !(h >= MIN_H && h.is_finite()) {
        return Err(format!("mesh size must be at least {MIN_H}"));
    }
    let d = domain(spec)?;
    let (mesh, pair) = ground_state(&d, h).map_err(|e| e.to_string())?;
    let spot = hotspot_locate(&pair, &mesh, &d);
    to_json(&json!({
        "vertices": xy(mesh.vertices()),
        "triangles": mesh.triangles(),
        "psi": pair.psi1,
        "mu1": pair.mu1,
        "residual": pair.residual,
        "argmax": [spot.argmax.re, spot.argmax.im],
        "dist_to_gamma1": spot.dist_to_gamma1,
        "gamma1": xy(&d.gamma1().samples(OUTLINE_SAMPLES)),
        "gamma2": xy(&d.gamma2().samples(OUTLINE_SAMPLES)),
    }))
}

/// One planar scaling coupling from `r₁e₂` and `r₂e₂` in the upper half of
/// the unit disk with `V ≡ 1`, recorded on the full grid.
pub fn coupled_path_json(r1: f64, r2: f64, seed: u64, dt: f64, max_time: f64) -> Result<String, String> {
    let spec = CouplingSpec::new(vec![0.0, 1.0], r1, r2).map_err(|e| e.to_string())?;
    let config = SimConfig::new(2, dt, max_time)
        .and_then(|c| c.with_killing(KillingSet::Hyperplane))
        .map_err(|e| e.to_string())?;
    let sample = coupled_run(
        &spec,
        &config,
        &Potential::constant(1.0),
        RngId { seed, path: 0 },
        true,
    )
    .map_err(|e| e.to_string())?;
    let ordering = coupled_ordering_check(&sample, 1e-9);
    let trace = sample.trace.as_ref().ok_or("trace was not recorded")?;
    to_json(&json!({
        "dt": trace.dt,
        "base": trace.base,
        "coupled": trace.coupled,
        "m": trace.m,
        "alpha": trace.alpha,
        "tau": sample.tau,
        "tau_tilde": sample.tau_tilde,
        "functional_base": sample.functional_base,
        "functional_coupled": sample.functional_coupled,
        "truncated": sample.truncated,
        "ordering": ordering,
    }))
}

#[wasm_bindgen]
pub fn symmetrize(spec: &str) -> Result<String, JsValue> {
    symmetrize_json(spec).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn eigen_field(spec: &str, h: f64) -> Result<String, JsValue> {
    eigen_field_json(spec, h).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn coupled_path(r1: f64, r2: f64, seed: u32, dt: f64, max_time: f64) -> Result<String, JsValue> {
    coupled_path_json(r1, r2, seed.into(), dt, max_time).map_err(|e| JsValue::from_str(&e))
}
