//! CSV and JSON writers.
//!
//! CSV columns, in order:
//!
//! | column        | content                                                     |
//! |---------------|-------------------------------------------------------------|
//! | `experiment`  | experiment id from the config                               |
//! | `L`           | number of sites                                             |
//! | `N`           | particle-number sector                                      |
//! | `U`           | interaction strength                                        |
//! | `pattern`     | tilde occupation pattern, mode 0 first                      |
//! | `method`      | `projection`, `finite-difference`, `fd-neutral-gap`, `fd-g-plus`, `fd-g-minus`, `fd-g` |
//! | `energy`      | extracted value                                             |
//! | `oracle`      | exact value it is compared with                             |
//! | `abs_error`   | `|energy - oracle|`                                         |
//! | `converged`   | optimizer reached its tolerance                             |
//! | `iterations`  | simplex iterations                                          |
//! | `wallclock_ms`| time spent on the U point; empty unless timings are enabled |
//!
//! Numeric fields are empty on error rows; the message is in the JSON file.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

use crate::run::Report;

pub const CSV_HEADER: [&str; 12] = [
    "experiment",
    "L",
    "N",
    "U",
    "pattern",
    "method",
    "energy",
    "oracle",
    "abs_error",
    "converged",
    "iterations",
    "wallclock_ms",
];

#[derive(Serialize)]
struct CsvRecord<'a> {
    experiment: &'a str,
    #[serde(rename = "L")]
    sites: usize,
    #[serde(rename = "N")]
    particles: usize,
    #[serde(rename = "U")]
    u: f64,
    pattern: &'a str,
    method: &'a str,
    energy: Option<f64>,
    oracle: Option<f64>,
    abs_error: Option<f64>,
    converged: bool,
    iterations: usize,
    wallclock_ms: Option<f64>,
}

/// Serializes the rows of `report` as CSV.
pub fn report_csv(report: &Report) -> anyhow::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let e = &report.config.experiment;
    for p in &report.points {
        for r in &p.rows {
            w.serialize(CsvRecord {
                experiment: &e.id,
                sites: e.sites,
                particles: r.particles,
                u: p.u,
                pattern: &r.pattern,
                method: &r.method,
                energy: r.energy,
                oracle: r.oracle,
                abs_error: r.abs_error,
                converged: p.converged,
                iterations: p.iterations,
                wallclock_ms: p.wallclock_ms,
            })?;
        }
    }
    // serde writes the header with the first record; an empty table still gets one
    let mut bytes = w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?;
    if bytes.is_empty() {
        let mut h = csv::Writer::from_writer(Vec::new());
        h.write_record(CSV_HEADER)?;
        bytes = h.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?;
    }
    Ok(bytes)
}

pub fn to_json<T: Serialize>(value: &T) -> anyhow::Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn write(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

/// Writes `<dir>/<id>_<kind>.csv` and `.json`; returns both paths.
pub fn write_report(dir: &Path, kind: &str, report: &Report) -> anyhow::Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let stem = format!("{}_{kind}", report.config.experiment.id);
    let csv_path = dir.join(format!("{stem}.csv"));
    let json_path = dir.join(format!("{stem}.json"));
    write(&csv_path, &report_csv(report)?)?;
    write(&json_path, &to_json(report)?)?;
    Ok((csv_path, json_path))
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> anyhow::Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    write(&path, &to_json(value)?)?;
    Ok(path)
}
