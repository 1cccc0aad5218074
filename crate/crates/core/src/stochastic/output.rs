use std::io::Write;

use serde::{Deserialize, Serialize};

use super::CouplingRow;

/// One line of a scenario's survival CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalRow {
    pub scenario_id: String,
    /// Start coordinates, one column each.
    pub start: Vec<f64>,
    pub r: f64,
    pub t: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub n: usize,
    pub dt: f64,
    pub seed: u64,
}

const AXES: [&str; 3] = ["start_x", "start_y", "start_z"];

/// Writes `rows` with columns `scenario_id, start_x, start_y[, start_z…],
/// r, t, estimate, stderr, N, dt, seed`. All rows must share a dimension.
pub fn write_survival_csv<W: Write>(out: W, rows: &[SurvivalRow]) -> Result<(), csv::Error> {
    let dim = rows.first().map_or(2, |r| r.start.len());
    if let Some(bad) = rows.iter().find(|r| r.start.len() != dim) {
        return Err(csv::Error::from(std::io::Error::new(
            std::io::ErrorKind::InvalidInput,
            format!(
                "row {} has dimension {}, expected {dim}",
                bad.scenario_id,
                bad.start.len()
            ),
        )));
    }
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["scenario_id".to_string()];
    header.extend((0..dim).map(|i| AXES.get(i).map_or(format!("start_{}", i + 1), |s| s.to_string())));
    header.extend(["r", "t", "estimate", "stderr", "N", "dt", "seed"].map(String::from));
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![r.scenario_id.clone()];
        rec.extend(r.start.iter().map(f64::to_string));
        rec.extend([
            r.r.to_string(),
            r.t.to_string(),
            r.estimate.to_string(),
            r.stderr.to_string(),
            r.n.to_string(),
            r.dt.to_string(),
            r.seed.to_string(),
        ]);
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes coupled-path diagnostics; missing times are empty fields.
pub fn write_coupling_csv<W: Write>(out: W, rows: &[CouplingRow]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "path_index",
        "tau",
        "tau_tilde",
        "alpha_tau_tilde",
        "functional_base",
        "functional_coupled",
        "ordering_holds",
    ])?;
    let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
    for r in rows {
        w.write_record([
            r.path_index.to_string(),
            opt(r.tau),
            opt(r.tau_tilde),
            opt(r.alpha_tau_tilde),
            r.functional_base.to_string(),
            r.functional_coupled.to_string(),
            r.ordering_holds.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
