//! Acceptance criteria 1–8, each run from the scenario files in
//! `scenarios/` and reported as one PASS/FAIL line.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use hotspots::experiments::{run_scenario, ResultRecord, ScenarioConfig};

fn scenarios() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

struct Runner {
    out: tempfile::TempDir,
}

impl Runner {
    fn run(&self, name: &str) -> Result<(ResultRecord, Duration), String> {
        let config =
            ScenarioConfig::load(&scenarios().join(format!("{name}.json"))).map_err(|e| e.to_string())?;
        let start = Instant::now();
        let record = run_scenario(&config, self.out.path()).map_err(|e| format!("{name}: {e}"))?;
        Ok((record, start.elapsed()))
    }
}

fn passed(record: &ResultRecord, check: &str) -> bool {
    record.check(check).is_some_and(|c| c.passed)
}

fn value(record: &ResultRecord, metric: &str) -> f64 {
    record.metric(metric).map_or(f64::NAN, |m| m.value)
}

type Outcome = Result<(bool, String), String>;

fn eigen_oracles(r: &Runner) -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for name in ["eig-half-disk", "eig-swapped-half-disk", "eig-sector"] {
        let (rec, took) = r.run(name)?;
        ok &= passed(&rec, "eigen_oracle") && took < Duration::from_secs(60);
        detail.push(format!(
            "{name} mu1 {:.5} rel {:.1e} in {:.1}s",
            value(&rec, "eigen.mu1"),
            value(&rec, "eigen.relative_error"),
            took.as_secs_f64()
        ));
    }
    Ok((ok, detail.join("; ")))
}

fn hotspot_records(r: &Runner) -> Result<Vec<(String, ResultRecord)>, String> {
    [
        "hotspots-half-disk",
        "hotspots-swapped-half-disk",
        "hotspots-sector",
    ]
    .iter()
    .map(|n| r.run(n).map(|(rec, _)| (n.to_string(), rec)))
    .collect()
}

fn hotspot_location(records: &[(String, ResultRecord)]) -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, rec) in records {
        ok &= passed(rec, "hotspot_on_gamma1") && passed(rec, "hotspot_at_maximizer");
        detail.push(format!(
            "{name} dist(γ₁) {:.1e} dist(max) {:.1e}",
            value(rec, "hotspot.dist_to_gamma1"),
            value(rec, "hotspot.dist_to_maximizer")
        ));
    }
    Ok((ok, detail.join("; ")))
}

fn curve_monotonicity(records: &[(String, ResultRecord)]) -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, rec) in records {
        ok &= passed(rec, "monotone_along_curves") && value(rec, "monotonicity.curves") == 16.0;
        detail.push(format!(
            "{name} {} violations on {} curves",
            value(rec, "monotonicity.violations"),
            value(rec, "monotonicity.curves")
        ));
    }
    Ok((ok, detail.join("; ")))
}

fn coupling(r: &Runner) -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut detail = Vec::new();
    for name in ["couple-constant", "couple-half-disk-map"] {
        let (rec, _) = r.run(name)?;
        ok &= passed(&rec, "ordering");
        detail.push(format!(
            "{name} ordering violations {:.2}%",
            100.0 * value(&rec, "coupling.ordering_violation_fraction")
        ));
    }
    for name in ["couple-killing-half-disk", "couple-killing-sector"] {
        let (rec, _) = r.run(name)?;
        ok &= passed(&rec, "ordering") && passed(&rec, "killing_chain");
        detail.push(format!(
            "{name} chain violations {:.2}%",
            100.0 * value(&rec, "coupling.killing_violation_fraction")
        ));
    }
    let took = start.elapsed();
    ok &= took < Duration::from_secs(300);
    detail.push(format!("{:.0}s total", took.as_secs_f64()));
    Ok((ok, detail.join("; ")))
}

fn tail(r: &Runner) -> Outcome {
    let (rec, _) = r.run("tail")?;
    let detail = ["d2", "d3"]
        .iter()
        .map(|d| {
            let v: Vec<String> = ["0.2", "0.5", "0.8"]
                .iter()
                .map(|radius| format!("{:.4}", value(&rec, &format!("tail.{d}.t0.4.r{radius}"))))
                .collect();
            format!("{d}: {}", v.join(" ≤ "))
        })
        .collect::<Vec<_>>()
        .join("; ");
    Ok((rec.passed() && rec.checks.len() == 4, detail))
}

fn conformal(r: &Runner) -> Outcome {
    let (maps, _) = r.run("maps")?;
    let (half, _) = r.run("map-half-disk")?;
    let ok = maps.passed() && half.passed() && maps.checks.len() >= 9;
    Ok((
        ok,
        format!(
            "disk residual {:.1e}; ellipse distance {:.1e}; lens seam {:.1e}; half-disk seam {:.1e}; min profile increment {:.1e}",
            value(&maps, "disk.affine_residual"),
            value(&maps, "ellipse.boundary_distance"),
            value(&maps, "domain.seam_jump"),
            value(&half, "domain.seam_jump"),
            ["disk", "ellipse", "domain"]
                .iter()
                .map(|l| value(&maps, &format!("{l}.profile_min_increment")))
                .chain([value(&half, "domain.profile_min_increment")])
                .fold(f64::INFINITY, f64::min)
        ),
    ))
}

fn geometry(r: &Runner) -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for name in ["geometry-half-disk", "geometry-lens"] {
        let (rec, _) = r.run(name)?;
        ok &= rec.passed()
            && passed(&rec, "symmetrization_convex")
            && passed(&rec, "origin_arc")
            && value(&rec, "origin_arc.checked") == 1000.0;
        detail.push(format!(
            "{name} origin-arc {}/{} involution {:.1e}",
            value(&rec, "origin_arc.checked") - value(&rec, "origin_arc.failures"),
            value(&rec, "origin_arc.checked"),
            value(&rec, "inversion.involution_error")
        ));
    }
    Ok((ok, detail.join("; ")))
}

fn crosscheck(r: &Runner) -> Outcome {
    let (rec, _) = r.run("crosscheck")?;
    Ok((
        passed(&rec, "expansion_agreement"),
        format!(
            "max deviation {:.2} stderr, gap factor {:.1e}",
            value(&rec, "crosscheck.max_deviation"),
            value(&rec, "crosscheck.gap_factor")
        ),
    ))
}

fn main() -> ExitCode {
    let runner = Runner {
        out: tempfile::tempdir().expect("temporary directory"),
    };
    let hotspots = hotspot_records(&runner);
    let results: Vec<(u8, &str, Outcome)> = vec![
        (1, "eigen-oracle agreement", eigen_oracles(&runner)),
        (
            2,
            "hot-spot localization",
            hotspots.clone().and_then(|h| hotspot_location(&h)),
        ),
        (
            3,
            "monotonicity along curves",
            hotspots.and_then(|h| curve_monotonicity(&h)),
        ),
        (4, "pathwise coupling inequality", coupling(&runner)),
        (5, "tail monotonicity", tail(&runner)),
        (6, "conformal module", conformal(&runner)),
        (7, "geometry", geometry(&runner)),
        (8, "cross-method consistency", crosscheck(&runner)),
    ];
    let mut all = true;
    for (k, title, outcome) in results {
        let (ok, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
        all &= ok;
        println!(
            "criterion {k} ({title}): {} [{detail}]",
            if ok { "PASS" } else { "FAIL" }
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
