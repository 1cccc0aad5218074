use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_hotspots");

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn run(sub: &str, config: &Path, out: &Path, env_out: Option<&Path>) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.arg(sub).arg("--config").arg(config).arg("--out").arg(out);
    cmd.env_remove("HOTSPOTS_OUT_DIR");
    if let Some(dir) = env_out {
        cmd.env("HOTSPOTS_OUT_DIR", dir);
    }
    cmd.output().unwrap()
}

fn eig(h: f64) -> String {
    format!(
        r#"{{"scenario_id":"eig-{h}","kind":"eig_solve","n":1,"seed":0,
            "options":{{"reference":{{"case":"half_disk_neumann_arc"}},"h":{h}}}}}"#
    )
}

const GEOMETRY: &str = r#"{"scenario_id":"geo","kind":"geometry_check",
    "domain":{"kind":"arc_gamma2","half_angle":0.7853981633974483,"corner_angle":1.5707963267948966},
    "n":40,"seed":3}"#;

#[test]
fn passing_scenario_exits_zero_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "geo.json", GEOMETRY);
    let out = run("check-geometry", &config, &dir.path().join("out"), None);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let scenario = dir.path().join("out/geo");
    let summary: Value =
        serde_json::from_str(&fs::read_to_string(scenario.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["passed"], true);
    let record: Value =
        serde_json::from_str(&fs::read_to_string(scenario.join("record.json")).unwrap()).unwrap();
    assert_eq!(record["kind"], "geometry_check");
    assert_eq!(record["config_hash"].as_str().unwrap().len(), 64);
    assert!(scenario.join("metrics.csv").exists());
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS symmetrization_convex"));
}

#[test]
fn failing_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "coarse.json", &eig(0.25));
    let out = run("eig", &config, dir.path(), None);
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("FAIL eigen_oracle"), "{stdout}");
    let summary: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("eig-0.25/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["passed"], false);
}

#[test]
fn configuration_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let geo = write(dir.path(), "geo.json", GEOMETRY);
    // Kind and subcommand disagree.
    assert_eq!(run("eig", &geo, dir.path(), None).status.code(), Some(2));
    let broken = write(dir.path(), "broken.json", "{ not json");
    assert_eq!(run("eig", &broken, dir.path(), None).status.code(), Some(2));
    let unknown = write(
        dir.path(),
        "unknown.json",
        &GEOMETRY.replace("\"n\":40", "\"n\":40,\"colour\":1"),
    );
    assert_eq!(
        run("check-geometry", &unknown, dir.path(), None).status.code(),
        Some(2)
    );
    let no_seed = write(dir.path(), "no-seed.json", &GEOMETRY.replace(",\"seed\":3", ""));
    assert_eq!(
        run("check-geometry", &no_seed, dir.path(), None).status.code(),
        Some(2)
    );
    let missing = dir.path().join("missing.json");
    assert_eq!(run("eig", &missing, dir.path(), None).status.code(), Some(2));

    let threads = Command::new(BIN)
        .args(["check-geometry", "--threads", "0", "--config"])
        .arg(&geo)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(threads.status.code(), Some(2));
}

#[test]
fn environment_overrides_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "geo.json", GEOMETRY);
    let flag = dir.path().join("flag");
    let env = dir.path().join("env");
    let out = run("check-geometry", &config, &flag, Some(&env));
    assert_eq!(out.status.code(), Some(0));
    assert!(env.join("geo/summary.json").exists());
    assert!(!flag.exists());
}

#[test]
fn reruns_produce_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "eig.json", &eig(0.1));
    let read = |sub: &str| {
        let base = dir.path().join(sub);
        assert_eq!(run("eig", &config, &base, None).status.code(), Some(0));
        ["psi1.csv", "metrics.csv", "mesh.txt"].map(|f| fs::read(base.join("eig-0.1").join(f)).unwrap())
    };
    assert_eq!(read("a"), read("b"));
}
