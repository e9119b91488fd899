//! CSV and JSON output.
//!
//! Files are named by appending to a path prefix: `out/` writes
//! `out/runs.csv`, `out/exp1_` writes `out/exp1_runs.csv`. Floats use Rust's
//! shortest round-trip formatting, so rereading a value yields the same bits.

use std::fs;
use std::path::{Path, PathBuf};

use super::campaign::{RunReport, SweepPoint};
use super::stats::Summary;
use crate::error::{Error, Result};

pub const RUNS_HEADER: [&str; 6] = [
    "run_id",
    "solver",
    "seed",
    "sum_rate_bps",
    "convergence_gen",
    "wall_ms",
];
pub const INTERFERENCE_HEADER: [&str; 4] = ["run_id", "solver", "pair_id", "interference_dbm"];
pub const TRACE_HEADER: [&str; 2] = ["generation", "best_fitness"];
pub const SWEEP_HEADER: [&str; 3] = ["length_m", "solver", "mean_sum_rate_bps"];

fn prefixed(prefix: &str, name: &str) -> PathBuf {
    PathBuf::from(format!("{prefix}{name}"))
}

fn ensure_parent(path: &Path) -> Result<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
        }
        _ => Ok(()),
    }
}

fn write_csv<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    ensure_parent(path)?;
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes `runs.csv`, `interference.csv`, one `trace_<solver>_<run>.csv` per
/// GA run and `summary.json`. Returns the paths written.
pub fn export(reports: &[RunReport], summary: &Summary, prefix: &str) -> Result<Vec<PathBuf>> {
    let mut reports: Vec<&RunReport> = reports.iter().collect();
    reports.sort_by_key(|r| r.run_id);
    let mut written = Vec::new();

    let runs = prefixed(prefix, "runs.csv");
    write_csv(
        &runs,
        &RUNS_HEADER,
        reports.iter().map(|r| {
            vec![
                r.run_id.to_string(),
                r.solver.clone(),
                r.seed.to_string(),
                r.sum_rate_bps.to_string(),
                r.convergence_gen.map(|g| g.to_string()).unwrap_or_default(),
                r.wall_ms.to_string(),
            ]
        }),
    )?;
    written.push(runs);

    let interference = prefixed(prefix, "interference.csv");
    write_csv(
        &interference,
        &INTERFERENCE_HEADER,
        reports.iter().flat_map(|r| {
            r.interference_dbm.iter().enumerate().map(move |(d, i)| {
                vec![
                    r.run_id.to_string(),
                    r.solver.clone(),
                    d.to_string(),
                    i.to_string(),
                ]
            })
        }),
    )?;
    written.push(interference);

    for r in &reports {
        if let Some(trace) = r.trace.as_ref().filter(|t| !t.is_empty()) {
            let path = prefixed(prefix, &format!("trace_{}_{}.csv", r.solver, r.run_id));
            write_csv(
                &path,
                &TRACE_HEADER,
                trace
                    .iter()
                    .enumerate()
                    .map(|(g, f)| vec![(g + 1).to_string(), f.to_string()]),
            )?;
            written.push(path);
        }
    }

    let json = prefixed(prefix, "summary.json");
    ensure_parent(&json)?;
    let text = serde_json::to_string_pretty(summary).expect("summary serializes");
    fs::write(&json, text).map_err(|e| Error::io(&json, e))?;
    written.push(json);
    Ok(written)
}

/// Writes `sweep.csv` with one row per (length, solver).
pub fn export_sweep(points: &[SweepPoint], prefix: &str) -> Result<PathBuf> {
    let path = prefixed(prefix, "sweep.csv");
    write_csv(
        &path,
        &SWEEP_HEADER,
        points.iter().flat_map(|p| {
            p.mean_sum_rate_bps
                .iter()
                .map(move |(s, m)| vec![p.length_m.to_string(), s.clone(), m.to_string()])
        }),
    )?;
    Ok(path)
}

/// One row of `runs.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    pub run_id: usize,
    pub solver: String,
    pub seed: u64,
    pub sum_rate_bps: f64,
    pub convergence_gen: Option<usize>,
    pub wall_ms: f64,
}

pub fn read_runs_csv(path: &Path) -> Result<Vec<RunRow>> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let bad = |what: &str, v: &str| Error::Parse(format!("{}: bad {what} `{v}`", path.display()));
    let mut reader = csv::Reader::from_path(path).map_err(csv_err)?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let rec = record.map_err(csv_err)?;
        let field = |i: usize| rec.get(i).unwrap_or("");
        rows.push(RunRow {
            run_id: field(0).parse().map_err(|_| bad("run_id", field(0)))?,
            solver: field(1).to_string(),
            seed: field(2).parse().map_err(|_| bad("seed", field(2)))?,
            sum_rate_bps: field(3)
                .parse()
                .map_err(|_| bad("sum_rate_bps", field(3)))?,
            convergence_gen: match field(4) {
                "" => None,
                g => Some(g.parse().map_err(|_| bad("convergence_gen", g))?),
            },
            wall_ms: field(5).parse().map_err(|_| bad("wall_ms", field(5)))?,
        });
    }
    Ok(rows)
}
