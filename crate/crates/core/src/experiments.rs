//! JSON-configured scenarios tying the modules into reproducible runs.
//!
//! A scenario is one JSON file. [`run_scenario`] executes it, writes its
//! CSV/JSON artifacts into an output directory and returns a
//! [`ResultRecord`]; every check in the record names the module invariant
//! it instantiates.
//!
//! ```json
//! {
//!   "scenario_id": "hotspots-half-disk",
//!   "kind": "hotspot_verify",
//!   "n": 1,
//!   "seed": 0,
//!   "options": { "reference": { "case": "half_disk_neumann_arc" }, "h": 0.01 }
//! }
//! ```

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::conformal::{
    build_disk_map, convexity_functional, half_disk_map, radial_profile_check, schwarz_reflect,
    HolomorphicMap, MapTarget, Potential,
};
use crate::geometry::{
    is_convex, is_starlike_complement, origin_arc, symmetrize_domain, ArcRole, BoundaryPiece, DirichletPart,
    DomainSpec, Location, MixedDomain, OriginArc, Starlike, GEOM_TOL,
};
use crate::spectral::{
    assemble, expansion_crosscheck, ground_state, hotspot_locate, monotonicity_along_curve, reference_eigen,
    EigenPair, EigenReport, NodalField, RayCurve, ReferenceCase, SpectralError, TriMesh, EIGEN_TOL,
};
use crate::stochastic::{
    coupling_batch, direct_survival, functional_tail_estimate, survival_probability, survival_via_conformal,
    write_coupling_csv, write_survival_csv, CouplingSpec, KillingSet, SimConfig, StochasticError,
    SurvivalEstimate, SurvivalRow,
};
use crate::{Error, Point};

/// Environment variable that overrides the output directory.
pub const OUT_DIR_ENV: &str = "HOTSPOTS_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    GeometryCheck,
    MapBuild,
    CouplingRun,
    TailMonotone,
    SurvivalField,
    EigSolve,
    HotspotVerify,
    Crosscheck,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 8] = [
        Self::GeometryCheck,
        Self::MapBuild,
        Self::CouplingRun,
        Self::TailMonotone,
        Self::SurvivalField,
        Self::EigSolve,
        Self::HotspotVerify,
        Self::Crosscheck,
    ];

    /// CLI subcommand running this kind.
    pub fn subcommand(self) -> &'static str {
        match self {
            Self::GeometryCheck => "check-geometry",
            Self::MapBuild => "build-map",
            Self::CouplingRun => "couple",
            Self::TailMonotone => "tail",
            Self::SurvivalField => "survival",
            Self::EigSolve => "eig",
            Self::HotspotVerify => "verify-hotspots",
            Self::Crosscheck => "crosscheck",
        }
    }
}

/// The potential `V` of a stochastic scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    Constant {
        value: f64,
    },
    /// `|f′|²` for the closed-form map of `U⁺` onto the half-disk.
    HalfDiskMap,
    /// `|f′|²` for the map onto the scenario's domain.
    DomainMap,
}

impl Default for PotentialSpec {
    fn default() -> Self {
        Self::Constant { value: 1.0 }
    }
}

/// Target of a `map_build` scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetSpec {
    Disk {
        center: [f64; 2],
        radius: f64,
    },
    Ellipse {
        center: [f64; 2],
        a: f64,
        b: f64,
    },
    /// The symmetrization of the scenario's domain.
    Domain,
}

impl TargetSpec {
    fn label(&self) -> &'static str {
        match self {
            Self::Disk { .. } => "disk",
            Self::Ellipse { .. } => "ellipse",
            Self::Domain => "domain",
        }
    }
}

/// Kind-specific parameters; each kind reads the fields it needs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioOptions {
    /// Mesh size.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    /// Closed-form case; replaces `domain` for spectral kinds.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<ReferenceCase>,
    /// Ball dimensions of a tail sweep (default `[2]`).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub dimensions: Vec<usize>,
    /// Coupling direction ζ (default the last unit vector in `d = 2`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zeta: Option<Vec<f64>>,
    /// Probe points `[x, y]` in `D`.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub probes: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_time: Option<f64>,
    /// Brownian-bridge crossing correction.
    pub bridge: bool,
    /// Number of curves for monotonicity checks (default 16).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curves: Option<usize>,
    /// Samples per curve (default `round(1/h) + 1`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples_per_curve: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub targets: Vec<TargetSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary_nodes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub map_tol: Option<f64>,
    /// Also estimate survival through the conformal map.
    pub conformal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario_id: String,
    pub kind: ScenarioKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainSpec>,
    #[serde(default)]
    pub potential: PotentialSpec,
    #[serde(default)]
    pub t_grid: Vec<f64>,
    #[serde(default)]
    pub r_grid: Vec<f64>,
    #[serde(alias = "N")]
    pub n: usize,
    #[serde(default = "default_dt")]
    pub dt: f64,
    pub seed: u64,
    /// Subdirectory of the output directory (default `scenario_id`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default)]
    pub options: ScenarioOptions,
}

fn default_dt() -> f64 {
    1e-3
}

fn config_error(message: impl Into<String>) -> Error {
    Error::Config(message.into())
}

impl ScenarioConfig {
    pub fn from_json(json: &str) -> Result<Self, Error> {
        let config: Self = serde_json::from_str(json).map_err(|e| config_error(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = fs::read_to_string(path)
            .map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), Error> {
        let id_ok = !self.scenario_id.is_empty()
            && self
                .scenario_id
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'));
        if !id_ok || self.scenario_id.starts_with('.') {
            return Err(config_error(format!(
                "scenario_id {:?} must be nonempty ASCII letters, digits, '-', '_' or '.'",
                self.scenario_id
            )));
        }
        if self.n == 0 {
            return Err(config_error("N must be at least 1"));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(config_error(format!("dt = {} must be positive", self.dt)));
        }
        if let Some(t) = self.t_grid.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
            return Err(config_error(format!(
                "t-grid value {t} must be finite and nonnegative"
            )));
        }
        if let Some(r) = self.r_grid.iter().find(|r| !(**r > 0.0 && **r < 1.0)) {
            return Err(config_error(format!("r-grid value {r} must lie in (0, 1)")));
        }
        if let Some(h) = self.options.h {
            if !(h > 0.0 && h.is_finite()) {
                return Err(config_error(format!("h = {h} must be positive")));
            }
        }
        if let Some(output) = &self.output {
            let p = Path::new(output);
            if p.is_absolute()
                || p.components()
                    .any(|c| matches!(c, std::path::Component::ParentDir))
            {
                return Err(config_error(format!(
                    "output {output:?} must be a relative path inside the output directory"
                )));
            }
        }
        if self.domain.is_some() && self.options.reference.is_some() {
            return Err(config_error("give either a domain or a reference case, not both"));
        }
        if let Some(spec) = &self.domain {
            spec.build().map_err(|e| config_error(format!("domain: {e}")))?;
        }
        if let Some(case) = self.options.reference {
            reference_eigen(case).map_err(|e| config_error(format!("reference: {e}")))?;
        }
        Ok(())
    }

    /// Directory the scenario writes into under `base`.
    pub fn output_dir(&self, base: &Path) -> PathBuf {
        base.join(self.output.as_deref().unwrap_or(&self.scenario_id))
    }

    fn domain(&self) -> Result<MixedDomain, Error> {
        if let Some(case) = self.options.reference {
            return Ok(reference_eigen(case)?.domain());
        }
        let spec = self
            .domain
            .as_ref()
            .ok_or_else(|| config_error(format!("{:?} needs a domain", self.kind)))?;
        spec.build().map_err(|e| config_error(format!("domain: {e}")))
    }

    fn potential(&self, dimension: usize) -> Result<Potential, Error> {
        let p = match &self.potential {
            PotentialSpec::Constant { value } => Potential::constant(*value),
            PotentialSpec::HalfDiskMap => Potential::from_map(Arc::new(half_disk_map())),
            PotentialSpec::DomainMap => Potential::from_map(domain_map(&self.domain()?)?),
        };
        if let Some(d) = p.dimension() {
            if d != dimension {
                return Err(config_error(format!(
                    "potential lives in dimension {d}, scenario uses {dimension}"
                )));
            }
        }
        Ok(p)
    }

    fn single_t(&self) -> Result<f64, Error> {
        match self.t_grid.as_slice() {
            [t] if *t > 0.0 => Ok(*t),
            _ => Err(config_error("t-grid must hold exactly one positive time")),
        }
    }

    fn probes(&self) -> Result<Vec<Point>, Error> {
        if self.options.probes.is_empty() {
            return Err(config_error("at least one probe point is required"));
        }
        Ok(self
            .options
            .probes
            .iter()
            .map(|p| Point::new(p[0], p[1]))
            .collect())
    }
}

/// `sha256("blob <len>\0" ++ bytes)` in hex, over the canonical JSON of the
/// config.
pub fn config_hash(config: &ScenarioConfig) -> String {
    let bytes = serde_json::to_vec(config).expect("configs serialize");
    let mut hasher = Sha256::new();
    hasher.update(format!("blob {}\0", bytes.len()).as_bytes());
    hasher.update(&bytes);
    hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// The module invariant this check instantiates.
    pub invariant: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub scenario_id: String,
    pub kind: ScenarioKind,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub config_hash: String,
    pub metrics: BTreeMap<String, Metric>,
    pub checks: Vec<Check>,
    /// Files written, relative to the output directory.
    pub outputs: Vec<String>,
}

impl ResultRecord {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn metric(&self, name: &str) -> Option<&Metric> {
        self.metrics.get(name)
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

struct Run {
    dir: PathBuf,
    metrics: BTreeMap<String, Metric>,
    checks: Vec<Check>,
    outputs: Vec<String>,
}

impl Run {
    fn metric(&mut self, name: impl Into<String>, value: f64) {
        self.metrics.insert(name.into(), Metric { value, stderr: None });
    }

    fn estimate(&mut self, name: impl Into<String>, e: &SurvivalEstimate) {
        self.metrics.insert(
            name.into(),
            Metric {
                value: e.estimate,
                stderr: Some(e.stderr),
            },
        );
    }

    fn check(&mut self, name: impl Into<String>, invariant: &str, passed: bool) {
        self.checks.push(Check {
            name: name.into(),
            invariant: invariant.to_string(),
            passed,
        });
    }

    fn write(&mut self, file: &str, bytes: &[u8]) -> Result<(), Error> {
        fs::write(self.dir.join(file), bytes)?;
        self.outputs.push(file.to_string());
        Ok(())
    }

    fn csv(
        &mut self,
        file: &str,
        header: &[&str],
        rows: impl IntoIterator<Item = Vec<String>>,
    ) -> Result<(), Error> {
        let mut w = csv::Writer::from_path(self.dir.join(file))?;
        w.write_record(header)?;
        for row in rows {
            w.write_record(&row)?;
        }
        w.flush()?;
        self.outputs.push(file.to_string());
        Ok(())
    }
}

/// Runs `config`, writing artifacts into `config.output_dir(base)`.
pub fn run_scenario(config: &ScenarioConfig, base: &Path) -> Result<ResultRecord, Error> {
    config.validate()?;
    let dir = config.output_dir(base);
    fs::create_dir_all(&dir)?;
    let mut run = Run {
        dir,
        metrics: BTreeMap::new(),
        checks: Vec::new(),
        outputs: Vec::new(),
    };
    match config.kind {
        ScenarioKind::GeometryCheck => geometry_check(config, &mut run)?,
        ScenarioKind::MapBuild => map_build(config, &mut run)?,
        ScenarioKind::CouplingRun => coupling_run(config, &mut run)?,
        ScenarioKind::TailMonotone => tail_monotone(config, &mut run)?,
        ScenarioKind::SurvivalField => survival_field(config, &mut run)?,
        ScenarioKind::EigSolve => eig_solve(config, &mut run)?,
        ScenarioKind::HotspotVerify => hotspot_verify(config, &mut run)?,
        ScenarioKind::Crosscheck => crosscheck(config, &mut run)?,
    }
    let record = ResultRecord {
        scenario_id: config.scenario_id.clone(),
        kind: config.kind,
        timestamp: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
        config_hash: config_hash(config),
        metrics: run.metrics,
        checks: run.checks,
        outputs: run.outputs,
    };
    fs::write(
        run.dir.join("record.json"),
        serde_json::to_string_pretty(&record)?,
    )?;
    Ok(record)
}

/// Summary written by [`emit_report`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub passed: bool,
    /// 0 when every check passed, 1 otherwise.
    pub exit_code: i32,
    pub records: Vec<ResultRecord>,
}

/// Writes `summary.json` and `metrics.csv` (one row per metric, grouped by
/// the family prefix before the first `.`) into `dir`.
pub fn emit_report(records: &[ResultRecord], dir: &Path) -> Result<Report, Error> {
    if records.is_empty() {
        return Err(config_error("no records to report"));
    }
    fs::create_dir_all(dir)?;
    let passed = records.iter().all(ResultRecord::passed);
    let report = Report {
        passed,
        exit_code: if passed { 0 } else { 1 },
        records: records.to_vec(),
    };
    fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&report)?)?;
    let mut w = csv::Writer::from_path(dir.join("metrics.csv"))?;
    w.write_record(["scenario_id", "family", "metric", "value", "stderr"])?;
    for r in records {
        for (name, m) in &r.metrics {
            let family = name.split('.').next().unwrap_or(name);
            w.write_record([
                r.scenario_id.as_str(),
                family,
                name,
                &m.value.to_string(),
                &m.stderr.map(|s| s.to_string()).unwrap_or_default(),
            ])?;
        }
    }
    w.flush()?;
    Ok(report)
}

/// The conformal map `f: U⁺ → D` with `f((−1, 1)) = γ₂`.
pub fn domain_map(domain: &MixedDomain) -> Result<Arc<dyn HolomorphicMap>, Error> {
    if domain.arc_role() != ArcRole::Gamma2IsArc {
        return Err(config_error("a conformal map needs γ₂ to be the arc"));
    }
    if *domain == MixedDomain::half_disk(DirichletPart::Arc) {
        return Ok(Arc::new(half_disk_map()));
    }
    let sym = symmetrize_domain(domain)?;
    if !sym.is_bounded() {
        return Err(config_error(
            "the symmetrized domain is unbounded and has no built-in closed-form map",
        ));
    }
    let map = build_disk_map(&MapTarget::Symmetrized(Box::new(sym)), 256, 1e-6)?;
    Ok(Arc::new(map))
}

/// `w ∈ U⁺` with `f(w) = z`: nearest grid point, then Newton.
pub fn preimage(map: &dyn HolomorphicMap, z: Point) -> Result<Point, Error> {
    let mut best = (f64::INFINITY, Point::new(0.0, 0.5));
    for j in 1..40 {
        let r = j as f64 / 40.0;
        for k in 1..80 {
            let w = Point::from_polar(r, PI * k as f64 / 80.0);
            let d = (map.value(w) - z).norm();
            if d < best.0 {
                best = (d, w);
            }
        }
    }
    let mut w = best.1;
    for _ in 0..60 {
        let step = (map.value(w) - z) / map.derivative(w);
        w -= step;
        if w.norm() >= 1.0 {
            w *= 0.999 / w.norm();
        }
        if step.norm() < 1e-14 {
            break;
        }
    }
    let miss = (map.value(w) - z).norm();
    if !(miss < 1e-10 && w.im > 0.0 && w.norm() < 1.0) {
        return Err(Error::Config(format!(
            "no preimage of {z} in U⁺ (residual {miss:.2e})"
        )));
    }
    Ok(w)
}

fn fmt(x: f64) -> String {
    x.to_string()
}

fn geometry_check(config: &ScenarioConfig, run: &mut Run) -> Result<(), Error> {
    let domain = config.domain()?;
    let (a0, a1) = domain.corner_angles()?;
    run.metric("corner.angle0", a0);
    run.metric("corner.angle1", a1);
    run.check(
        "corner_angles",
        "geometry: corner angles ≤ π/2",
        domain.satisfies_angle_hypothesis(1e-9)?,
    );

    let circle = domain.arc().circle();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (mut involution, mut fixed) = (0.0_f64, 0.0_f64);
    for _ in 0..config.n {
        let r = circle.radius * (0.1 + 3.9 * rng.random::<f64>());
        let z = circle.center + Point::from_polar(r, 2.0 * PI * rng.random::<f64>());
        involution = involution.max((circle.invert(circle.invert(z)?)? - z).norm());
        let on = circle.point_at(2.0 * PI * rng.random::<f64>());
        fixed = fixed.max((circle.invert(on)? - on).norm());
    }
    run.metric("inversion.involution_error", involution);
    run.metric("inversion.fixed_circle_error", fixed);
    run.check(
        "inversion_involution",
        "geometry: inversion involution",
        involution < 1e-12,
    );
    run.check("inversion_fixed_circle", "geometry: fixed circle", fixed < 1e-12);

    match domain.arc_role() {
        ArcRole::Gamma2IsArc => {
            let sym = symmetrize_domain(&domain)?;
            let convex = is_convex(sym.full_boundary(), GEOM_TOL)?.is_convex();
            run.metric("symmetrized.bounded", f64::from(u8::from(sym.is_bounded())));
            run.check(
                "symmetrization_convex",
                "geometry: symmetrization convexity",
                convex,
            );
            run.csv(
                "symmetrized_boundary.csv",
                &["x", "y"],
                sym.full_boundary().iter().map(|p| vec![fmt(p.re), fmt(p.im)]),
            )?;

            let (lo, hi) = domain.bounding_box();
            let interior = |rng: &mut ChaCha8Rng| loop {
                let z = Point::new(
                    lo.re + (hi.re - lo.re) * rng.random::<f64>(),
                    lo.im + (hi.im - lo.im) * rng.random::<f64>(),
                );
                if domain.contains(z) == Location::Interior {
                    return z;
                }
            };
            // pairs whose arc meets γ₂ before z2 are outside the condition's
            // scope and are redrawn
            let (mut checked, mut excluded, mut failures) = (0, 0, 0);
            let mut attempt = 0;
            while checked < config.n && attempt < 50 * config.n {
                let z1 = interior(&mut rng);
                // every fourth pair ends on γ₂
                let z2 = if attempt % 4 == 3 {
                    domain.gamma2().point(0.02 + 0.96 * rng.random::<f64>())
                } else {
                    interior(&mut rng)
                };
                attempt += 1;
                match origin_arc(&domain, z1, z2)? {
                    OriginArc::MeetsGamma2 { .. } => excluded += 1,
                    OriginArc::Contained => checked += 1,
                    OriginArc::Leaves { .. } => {
                        checked += 1;
                        failures += 1;
                    }
                }
            }
            run.metric("origin_arc.checked", checked as f64);
            run.metric("origin_arc.excluded", excluded as f64);
            run.metric("origin_arc.failures", failures as f64);
            run.check(
                "origin_arc",
                "geometry: origin-arc condition",
                failures == 0 && checked == config.n,
            );
        }
        ArcRole::Gamma1IsArc => {
            let unit = circle.center.norm() < GEOM_TOL && (circle.radius - 1.0).abs() < GEOM_TOL;
            if unit {
                let starlike = is_starlike_complement(&domain)?;
                if let Starlike::No { z, t } = starlike {
                    run.metric("starlike.witness_x", z.re);
                    run.metric("starlike.witness_y", z.im);
                    run.metric("starlike.witness_t", t);
                }
                run.check(
                    "starlike_complement",
                    "geometry: starlike complement",
                    starlike.holds(),
                );
            }
        }
    }
    Ok(())
}

fn polar_grid(nr: usize, nt: usize) -> impl Iterator<Item = Point> {
    (0..nr).flat_map(move |j| {
        let r = (j as f64 + 0.5) / nr as f64;
        (0..nt).map(move |k| Point::from_polar(r, 2.0 * PI * k as f64 / nt as f64))
    })
}

fn map_build(config: &ScenarioConfig, run: &mut Run) -> Result<(), Error> {
    let targets = if config.options.targets.is_empty() {
        vec![TargetSpec::Domain]
    } else {
        config.options.targets.clone()
    };
    let mut labels: Vec<&str> = targets.iter().map(TargetSpec::label).collect();
    labels.sort_unstable();
    if labels.windows(2).any(|w| w[0] == w[1]) {
        return Err(config_error("each target kind may appear once"));
    }
    let nodes = config.options.boundary_nodes.unwrap_or(512);
    let radii: Vec<f64> = (1..=64).map(|k| k as f64 / 65.0).collect();
    for target in &targets {
        let label = target.label();
        let tol = config.options.map_tol.unwrap_or(1e-5);
        let map: Arc<dyn HolomorphicMap> = match target {
            TargetSpec::Disk { center, radius } => {
                let center = Point::new(center[0], center[1]);
                let m = build_disk_map(
                    &MapTarget::Disk {
                        center,
                        radius: *radius,
                    },
                    nodes,
                    tol,
                )?;
                let c = m.coefficients();
                let residual = (c[0] - center).norm()
                    + (c[1] - radius).norm()
                    + c[2..].iter().map(|c| c.norm()).sum::<f64>();
                run.metric(format!("{label}.affine_residual"), residual);
                run.check("disk_recovery", "conformal: identity recovery", residual < 1e-10);
                run.write("map_disk.json", m.to_json()?.as_bytes())?;
                Arc::new(m)
            }
            TargetSpec::Ellipse { center, a, b } => {
                let target = MapTarget::Ellipse {
                    center: Point::new(center[0], center[1]),
                    a: *a,
                    b: *b,
                };
                let m = build_disk_map(&target, nodes, tol)?;
                let distance = m.boundary_distance().unwrap_or(f64::INFINITY);
                run.metric(format!("{label}.boundary_distance"), distance);
                run.check(
                    "ellipse_boundary",
                    "conformal: boundary distance",
                    distance < 1e-5,
                );
                run.write("map_ellipse.json", m.to_json()?.as_bytes())?;
                Arc::new(m)
            }
            TargetSpec::Domain => {
                let domain = config.domain()?;
                let circle = domain.arc().circle();
                let map = domain_map(&domain)?;
                let seam = if domain == MixedDomain::half_disk(DirichletPart::Arc) {
                    run.write(
                        "map_domain.json",
                        serde_json::to_string_pretty(&half_disk_map())?.as_bytes(),
                    )?;
                    schwarz_reflect(half_disk_map(), circle, 1e-6)?.seam_jump()
                } else {
                    let sym = symmetrize_domain(&domain)?;
                    let m = build_disk_map(&MapTarget::Symmetrized(Box::new(sym)), nodes, tol)?;
                    run.metric(
                        format!("{label}.boundary_distance"),
                        m.boundary_distance().unwrap_or(f64::INFINITY),
                    );
                    run.write("map_domain.json", m.to_json()?.as_bytes())?;
                    let mut symmetry = 0.0_f64;
                    for z in polar_grid(32, 32) {
                        symmetry = symmetry.max((circle.invert(m.value(z.conj()))? - m.value(z)).norm());
                    }
                    run.metric(format!("{label}.symmetry_error"), symmetry);
                    run.check("map_symmetry", "conformal: symmetry", symmetry < 1e-8);
                    schwarz_reflect(m, circle, 1e-6)?.seam_jump()
                };
                run.metric(format!("{label}.seam_jump"), seam);
                run.check("seam_analyticity", "conformal: seam analyticity", seam < 1e-6);
                let potential = Potential::from_map(map.clone());
                run.check(
                    "potential_admissible",
                    "conformal: potential admissibility",
                    potential.is_admissible(),
                );
                map
            }
        };
        let mut min_convexity = f64::INFINITY;
        for z in polar_grid(64, 64) {
            min_convexity = min_convexity.min(convexity_functional(map.as_ref(), z)?);
        }
        run.metric(format!("{label}.min_convexity"), min_convexity);
        run.check(
            format!("{label}_convexity"),
            "conformal: positivity",
            min_convexity > 0.0,
        );
        let mut min_increment = f64::INFINITY;
        for k in 0..64 {
            let p = radial_profile_check(map.as_ref(), 2.0 * PI * k as f64 / 64.0, &radii)?;
            min_increment = min_increment.min(p.min_increment);
        }
        run.metric(format!("{label}.profile_min_increment"), min_increment);
        run.check(
            format!("{label}_radial_profile"),
            "conformal: monotone radial profile",
            min_increment >= -1e-8,
        );
    }
    Ok(())
}

fn coupling_run(config: &ScenarioConfig, run: &mut Run) -> Result<(), Error> {
    let zeta = config.options.zeta.clone().unwrap_or_else(|| vec![0.0, 1.0]);
    let [r1, r2] = config.r_grid[..] else {
        return Err(config_error("coupling needs r-grid [r1, r2]"));
    };
    let spec = CouplingSpec::new(zeta.clone(), r1, r2).map_err(|e| config_error(e.to_string()))?;
    let d = zeta.len();
    let mut sim = SimConfig::new(d, config.dt, config.options.max_time.unwrap_or(10.0))
        .map_err(|e| config_error(e.to_string()))?
        .with_bridge(config.options.bridge);
    let certificate = match &config.domain {
        None if config.options.reference.is_none() => None,
        _ => {
            let domain = config.domain()?;
            let cert = match is_starlike_complement(&domain)? {
                Starlike::Yes(c) => c,
                Starlike::No { z, t } => {
                    return Err(config_error(format!(
                        "U∖D is not starlike (z = {z}, t = {t}); the killing-time chain is not defined"
                    )))
                }
            };
            sim = sim
                .with_killing(KillingSet::Curve(Arc::new(domain)))
                .map_err(|e| config_error(e.to_string()))?;
            Some(cert)
        }
    };
    let potential = config.potential(d)?;
    let summary = coupling_batch(
        &spec,
        &sim,
        &potential,
        config.n,
        config.seed,
        certificate.as_ref(),
    )
    .map_err(|e| match e {
        StochasticError::Inadmissible(_) | StochasticError::Precondition(_) => config_error(e.to_string()),
        other => other.into(),
    })?;
    let ordering = summary.ordering_violation_fraction();
    run.metric("coupling.ordering_violation_fraction", ordering);
    run.metric("coupling.truncated", summary.truncated as f64);
    run.metric("coupling.tol", summary.tol);
    run.check("ordering", "stochastic: ordering", ordering < 0.01);
    if let Some(killing) = summary.killing_violation_fraction() {
        run.metric("coupling.killing_violation_fraction", killing);
        run.check("killing_chain", "stochastic: Case-2 ordering", killing < 0.01);
    }
    let mut buf = Vec::new();
    write_coupling_csv(&mut buf, &summary.rows)?;
    run.write("coupling.csv", &buf)
}

fn tail_monotone(config: &ScenarioConfig, run: &mut Run) -> Result<(), Error> {
    if config.r_grid.len() < 2 || config.r_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(config_error("r-grid must hold at least two increasing radii"));
    }
    if config.t_grid.is_empty() {
        return Err(config_error("t-grid is empty"));
    }
    let dims = if config.options.dimensions.is_empty() {
        vec![2]
    } else {
        config.options.dimensions.clone()
    };
    for &d in &dims {
        let sim = SimConfig::new(d, config.dt, config.options.max_time.unwrap_or(20.0))
            .map_err(|e| config_error(e.to_string()))?
            .with_bridge(config.options.bridge);
        let potential = config.potential(d)?;
        if !potential.is_admissible() {
            return Err(config_error("tail monotonicity needs an admissible potential"));
        }
        let mut rows = Vec::new();
        for &t in &config.t_grid {
            let mut estimates = Vec::new();
            for &r in &config.r_grid {
                let mut start = vec![0.0; d];
                start[d - 1] = r;
                let e = functional_tail_estimate(&start, &potential, t, config.n, &sim, config.seed)?;
                run.estimate(format!("tail.d{d}.t{t}.r{r}"), &e);
                rows.push(SurvivalRow {
                    scenario_id: config.scenario_id.clone(),
                    start,
                    r,
                    t,
                    estimate: e.estimate,
                    stderr: e.stderr,
                    n: e.n,
                    dt: e.dt,
                    seed: e.seed,
                });
                estimates.push(e);
            }
            let monotone = estimates.windows(2).all(|w| w[1].estimate >= w[0].estimate);
            run.check(
                format!("tail_nondecreasing_d{d}_t{t}"),
                "stochastic: tail monotonicity",
                monotone,
            );
            let (first, last) = (estimates[0], estimates[estimates.len() - 1]);
            let disjoint = first.interval(1.96).1 < last.interval(1.96).0;
            run.check(
                format!("extreme_ci_disjoint_d{d}_t{t}"),
                "stochastic: tail monotonicity",
                disjoint,
            );
        }
        let mut buf = Vec::new();
        write_survival_csv(&mut buf, &rows)?;
        run.write(&format!("tail_d{d}.csv"), &buf)?;
    }
    Ok(())
}

fn survival_field(config: &ScenarioConfig, run: &mut Run) -> Result<(), Error> {
    let domain = config.domain()?;
    let probes = config.probes()?;
    let mut times = config.t_grid.clone();
    if times.is_empty() || times.iter().any(|t| *t <= 0.0) {
        return Err(config_error("t-grid must hold positive times"));
    }
    times.sort_by(f64::total_cmp);
    let t_max = times[times.len() - 1];
    let sim = SimConfig::new(2, config.dt, config.options.max_time.unwrap_or(2.0 * t_max))
        .map_err(|e| config_error(e.to_string()))?
        .with_bridge(config.options.bridge);
    let map = if config.options.conformal {
        Some(domain_map(&domain)?)
    } else {
        None
    };
    let (mut rows, mut conformal_rows) = (Vec::new(), Vec::new());
    let mut corner_kills = 0;
    let mut worst_increase = f64::NEG_INFINITY;
    let mut worst_disagreement = 0.0_f64;
    for (i, z) in probes.iter().enumerate() {
        if domain.contains(*z) != Location::Interior {
            return Err(config_error(format!("probe {z} is not interior to the domain")));
        }
        let row = |e: &SurvivalEstimate, t: f64| SurvivalRow {
            scenario_id: config.scenario_id.clone(),
            start: vec![z.re, z.im],
            r: z.norm(),
            t,
            estimate: e.estimate,
            stderr: e.stderr,
            n: e.n,
            dt: e.dt,
            seed: e.seed,
        };
        let mut previous: Option<SurvivalEstimate> = None;
        for &t in &times {
            let direct = direct_survival(&domain, *z, t, config.n, &sim, config.seed)?;
            corner_kills += direct.corner_kills;
            let e = direct.estimate;
            run.estimate(format!("survival.p{i}.t{t}"), &e);
            if let Some(p) = previous {
                let combined = (p.stderr.powi(2) + e.stderr.powi(2)).sqrt();
                worst_increase = worst_increase.max(e.estimate - p.estimate - 3.0 * combined);
            }
            previous = Some(e);
            rows.push(row(&e, t));
            if let Some(map) = &map {
                let w = preimage(map.as_ref(), *z)?;
                let c = survival_via_conformal(
                    &domain,
                    map.clone(),
                    w,
                    t,
                    config.n,
                    &sim,
                    config.seed.wrapping_add(1),
                )?;
                run.estimate(format!("conformal.p{i}.t{t}"), &c);
                let combined = (c.stderr.powi(2) + e.stderr.powi(2)).sqrt();
                let score = if combined > 0.0 {
                    (c.estimate - e.estimate).abs() / combined
                } else if c.estimate == e.estimate {
                    0.0
                } else {
                    f64::INFINITY
                };
                worst_disagreement = worst_disagreement.max(score);
                conformal_rows.push(row(&c, t));
            }
        }
    }
    run.metric("survival.corner_kills", corner_kills as f64);
    run.check(
        "survival_nonincreasing_in_t",
        "stochastic: survival nonincreasing in t",
        worst_increase <= 0.0,
    );
    let mut buf = Vec::new();
    write_survival_csv(&mut buf, &rows)?;
    run.write("survival.csv", &buf)?;
    if map.is_some() {
        run.metric("conformal.max_disagreement", worst_disagreement);
        run.check(
            "conformal_matches_direct",
            "stochastic: conformal route agrees with direct simulation",
            worst_disagreement < 3.0,
        );
        let mut buf = Vec::new();
        write_survival_csv(&mut buf, &conformal_rows)?;
        run.write("survival_conformal.csv", &buf)?;
    }
    Ok(())
}

struct Solved {
    domain: MixedDomain,
    reference: Option<ReferenceCase>,
    mesh: TriMesh,
    pair: EigenPair,
    h: f64,
}

fn solve(config: &ScenarioConfig, default_h: f64, run: &mut Run) -> Result<Solved, Error> {
    let domain = config.domain()?;
    let h = config.options.h.unwrap_or(default_h);
    if !(h < domain.diameter() / 4.0) {
        return Err(config_error(format!(
            "h = {h} must be below a quarter of the diameter"
        )));
    }
    let (mesh, pair) = ground_state(&domain, h)?;
    run.metric("eigen.mu1", pair.mu1);
    run.metric("eigen.residual", pair.residual);
    if let Some(mu2) = pair.mu2 {
        run.metric("eigen.mu2", mu2);
    }
    run.metric("mesh.vertices", mesh.vertices().len() as f64);
    run.metric("mesh.min_angle_deg", mesh.min_angle().to_degrees());
    Ok(Solved {
        domain,
        reference: config.options.reference,
        mesh,
        pair,
        h,
    })
}

fn oracle_check(s: &Solved, run: &mut Run) -> Result<(), Error> {
    if let Some(case) = s.reference {
        let exact = reference_eigen(case)?.mu1;
        let rel = (s.pair.mu1 - exact).abs() / exact;
        let tol = if matches!(case, ReferenceCase::Sector { .. }) {
            0.015
        } else {
            0.01
        };
        run.metric("eigen.mu1_exact", exact);
        run.metric("eigen.relative_error", rel);
        run.check("eigen_oracle", "spectral: eigen-oracle agreement", rel < tol);
    }
    Ok(())
}

fn eig_solve(config: &ScenarioConfig, run: &mut Run) -> Result<(), Error> {
    let s = solve(config, 0.02, run)?;
    let hotspot = hotspot_locate(&s.pair, &s.mesh, &s.domain);
    let system = assemble(&s.mesh)?;
    let free: Vec<f64> = system.free_to_vertex.iter().map(|&v| s.pair.psi1[v]).collect();
    let quad = |a: &sprs::CsMat<f64>| -> f64 {
        a.outer_iterator()
            .enumerate()
            .map(|(i, row)| free[i] * row.iter().map(|(j, v)| v * free[j]).sum::<f64>())
            .sum()
    };
    let rayleigh = quad(&system.k) / quad(&system.m);
    run.metric("eigen.rayleigh_gap", (rayleigh - s.pair.mu1).abs());
    run.check(
        "residual",
        "spectral: residual below tolerance",
        s.pair.residual < EIGEN_TOL,
    );
    run.check(
        "rayleigh_quotient",
        "spectral: Rayleigh-quotient consistency",
        (rayleigh - s.pair.mu1).abs() < 1e-8 * s.pair.mu1,
    );
    let dirichlet = s.mesh.dirichlet_vertices();
    run.check(
        "dirichlet_zero",
        "spectral: ψ₁ vanishes on Dirichlet vertices",
        s.pair.psi1.iter().zip(&dirichlet).all(|(v, d)| !d || *v == 0.0),
    );
    run.check(
        "ground_state_sign",
        "spectral: ψ₁ ≥ −1e−10",
        s.pair.psi1.iter().all(|v| *v >= -1e-10),
    );
    run.check(
        "mesh_quality",
        "spectral: min triangle angle ≥ 20°",
        s.mesh.min_angle().to_degrees() >= 20.0,
    );
    oracle_check(&s, run)?;
    let report = EigenReport::new(&s.pair, &hotspot, &s.mesh);
    run.write("eigen.json", serde_json::to_string_pretty(&report)?.as_bytes())?;
    run.write("mesh.txt", s.mesh.to_text().as_bytes())?;
    run.csv(
        "psi1.csv",
        &["x", "y", "psi1"],
        s.mesh
            .vertices()
            .iter()
            .zip(&s.pair.psi1)
            .map(|(p, v)| vec![fmt(p.re), fmt(p.im), fmt(*v)]),
    )
}

fn hotspot_verify(config: &ScenarioConfig, run: &mut Run) -> Result<(), Error> {
    let s = solve(config, 0.01, run)?;
    oracle_check(&s, run)?;
    let hotspot = hotspot_locate(&s.pair, &s.mesh, &s.domain);
    run.metric("hotspot.x", hotspot.argmax.re);
    run.metric("hotspot.y", hotspot.argmax.im);
    run.metric("hotspot.dist_to_gamma1", hotspot.dist_to_gamma1);
    run.check(
        "hotspot_on_gamma1",
        "spectral: hot-spot containment",
        hotspot.dist_to_gamma1 <= s.h,
    );
    if let Some(case) = s.reference {
        let target = reference_eigen(case)?.maximizer();
        let miss = (hotspot.argmax - target).norm();
        run.metric("hotspot.dist_to_maximizer", miss);
        run.check(
            "hotspot_at_maximizer",
            "spectral: hot-spot localization",
            miss <= s.h,
        );
    }

    let count = config.options.curves.unwrap_or(16);
    let samples = config
        .options
        .samples_per_curve
        .unwrap_or((1.0 / s.h).round() as usize + 1);
    let curves = match s.domain.arc_role() {
        ArcRole::Gamma1IsArc => RayCurve::euclidean_family(&s.domain, count, samples)?,
        ArcRole::Gamma2IsArc => RayCurve::hyperbolic_family(domain_map(&s.domain)?.as_ref(), count, samples),
    };
    let field = NodalField::new(&s.mesh, &s.pair.psi1)?;
    let mut rows = Vec::new();
    let mut total = 0;
    let mut min_increment = f64::INFINITY;
    for c in &curves {
        let m = monotonicity_along_curve(&field, c)?;
        let end = *c.samples.last().expect("curves have samples");
        let off = s.domain.curve(BoundaryPiece::Gamma1).distance(end);
        total += m.violations;
        min_increment = min_increment.min(m.min_increment);
        rows.push(vec![
            format!("{:?}", c.kind),
            fmt(c.theta),
            m.violations.to_string(),
            fmt(m.min_increment),
            fmt(off),
        ]);
    }
    run.metric("monotonicity.curves", curves.len() as f64);
    run.metric("monotonicity.violations", total as f64);
    run.metric("monotonicity.min_increment", min_increment);
    run.check(
        "monotone_along_curves",
        "spectral: zero monotonicity violations",
        total == 0,
    );
    run.csv(
        "curves.csv",
        &[
            "kind",
            "theta",
            "violations",
            "min_increment",
            "end_dist_to_gamma1",
        ],
        rows,
    )?;
    let report = EigenReport::new(&s.pair, &hotspot, &s.mesh);
    run.write("eigen.json", serde_json::to_string_pretty(&report)?.as_bytes())
}

fn crosscheck(config: &ScenarioConfig, run: &mut Run) -> Result<(), Error> {
    let t = config.single_t()?;
    let probes = config.probes()?;
    let s = solve(config, 0.01, run)?;
    let in_ball = s.domain == MixedDomain::half_disk(DirichletPart::Straight);
    let sim = SimConfig::new(2, config.dt, config.options.max_time.unwrap_or(2.0 * t))
        .map_err(|e| config_error(e.to_string()))?
        .with_bridge(config.options.bridge);
    let mut estimates = Vec::new();
    for (i, z) in probes.iter().enumerate() {
        if s.domain.contains(*z) != Location::Interior {
            return Err(config_error(format!("probe {z} is not interior to the domain")));
        }
        let seed = config.seed.wrapping_add(i as u64);
        let e = if in_ball {
            survival_probability(&[z.re, z.im], t, config.n, &sim, seed)?
        } else {
            direct_survival(&s.domain, *z, t, config.n, &sim, seed)?.estimate
        };
        estimates.push((*z, e));
    }
    let cc = expansion_crosscheck(&s.mesh, &s.pair, &estimates, t).map_err(|e| match e {
        SpectralError::SpectralGap { .. } | SpectralError::Precondition(_) => config_error(e.to_string()),
        other => other.into(),
    })?;
    run.metric("crosscheck.max_deviation", cc.max_deviation);
    run.metric("crosscheck.gap_factor", cc.gap_factor);
    for (i, p) in cc.probes.iter().enumerate() {
        run.metric(format!("crosscheck.p{i}.predicted"), p.predicted);
        run.metrics.insert(
            format!("crosscheck.p{i}.estimate"),
            Metric {
                value: p.estimate,
                stderr: Some(p.stderr),
            },
        );
    }
    run.check(
        "expansion_agreement",
        "spectral: expansion cross-check",
        cc.max_deviation < 3.0,
    );
    run.csv(
        "crosscheck.csv",
        &["x", "y", "t", "predicted", "estimate", "stderr", "score"],
        cc.probes.iter().map(|p| {
            vec![
                fmt(p.z.re),
                fmt(p.z.im),
                fmt(t),
                fmt(p.predicted),
                fmt(p.estimate),
                fmt(p.stderr),
                fmt(p.score),
            ]
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(json: &str) -> Result<ScenarioConfig, Error> {
        ScenarioConfig::from_json(json)
    }

    #[test]
    fn parse_and_validate() {
        let c =
            config(r#"{"scenario_id":"a","kind":"eig_solve","N":1,"seed":3,"domain":{"kind":"half_disk"}}"#)
                .unwrap();
        assert_eq!(c.n, 1);
        assert_eq!(c.dt, 1e-3);
        assert_eq!(c.potential, PotentialSpec::Constant { value: 1.0 });
        for bad in [
            r#"{"scenario_id":"a","kind":"eig_solve","n":0,"seed":3}"#,
            r#"{"scenario_id":"a","kind":"eig_solve","n":1}"#,
            r#"{"scenario_id":"a/b","kind":"eig_solve","n":1,"seed":3}"#,
            r#"{"scenario_id":"a","kind":"nope","n":1,"seed":3}"#,
            r#"{"scenario_id":"a","kind":"eig_solve","n":1,"seed":3,"extra":1}"#,
            r#"{"scenario_id":"a","kind":"tail_monotone","n":1,"seed":3,"r_grid":[1.5]}"#,
            r#"{"scenario_id":"a","kind":"eig_solve","n":1,"seed":3,"output":"../x"}"#,
            r#"{"scenario_id":"a","kind":"eig_solve","n":1,"seed":3,"domain":{"kind":"sector","half_angle":2.0}}"#,
        ] {
            assert!(config(bad).unwrap_err().is_config(), "{bad}");
        }
    }

    #[test]
    fn hash_is_git_style_sha256() {
        let c = config(r#"{"scenario_id":"a","kind":"eig_solve","n":1,"seed":3}"#).unwrap();
        let bytes = serde_json::to_vec(&c).unwrap();
        let mut framed = format!("blob {}\0", bytes.len()).into_bytes();
        framed.extend(&bytes);
        let expected: String = Sha256::digest(&framed)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect();
        assert_eq!(config_hash(&c), expected);
        assert_eq!(expected.len(), 64);
        let mut other = c.clone();
        other.seed = 4;
        assert_ne!(config_hash(&other), expected);
    }

    #[test]
    fn subcommands_are_distinct() {
        let mut names: Vec<_> = ScenarioKind::ALL.iter().map(|k| k.subcommand()).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), 8);
    }

    #[test]
    fn preimage_inverts_the_half_disk_map() {
        let f = half_disk_map();
        let z = Point::new(0.3, 0.4);
        let w = preimage(&f, z).unwrap();
        assert!((f.value(w) - z).norm() < 1e-10);
        assert!(w.im > 0.0);
    }
}
