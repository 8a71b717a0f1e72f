//! File formats. Every float is written with 17 significant digits so that
//! re-reading reproduces it exactly; every file is written to a temporary
//! sibling and renamed into place.

use std::fs;
use std::io::Write;
use std::path::Path;

use mobo_core::doe::Dataset;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::driver::{ExperimentSummary, RunRecord};
use crate::error::DriverError;
use crate::external::format_f64;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DriverError + '_ {
    move |source| DriverError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), DriverError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(path))?;
    tmp.write_all(bytes).map_err(io_err(path))?;
    tmp.as_file().sync_all().map_err(io_err(path))?;
    tmp.persist(path).map_err(|e| io_err(path)(e.error))?;
    Ok(())
}

fn opt(v: Option<f64>) -> String {
    v.map(format_f64).unwrap_or_default()
}

fn table(header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}

/// `iteration,igd_plus_mean,igd_plus_std`; empty cells where no run had a
/// feasible point yet.
pub fn trace_csv(summary: &ExperimentSummary) -> String {
    let header = ["iteration", "igd_plus_mean", "igd_plus_std"].map(String::from);
    table(
        &header,
        summary
            .trace_mean
            .iter()
            .zip(&summary.trace_std)
            .enumerate()
            .map(|(i, (m, s))| vec![(i + 1).to_string(), opt(*m), opt(*s)]),
    )
}

/// `f1,f2,...`
pub fn front_csv(points: &[Vec<f64>]) -> String {
    let n = points.first().map_or(2, Vec::len);
    let header: Vec<String> = (1..=n).map(|j| format!("f{j}")).collect();
    table(&header, points.iter().map(|p| p.iter().map(|v| format_f64(*v)).collect()))
}

/// Per-iteration rows of one run.
pub fn rows_csv(record: &RunRecord) -> String {
    let Some(first) = record.samples().next() else {
        return String::new();
    };
    let (d, n, p, m) = (first.x.len(), first.f.len(), first.g.len(), first.h.len());
    let mut header = vec!["iteration".to_string()];
    header.extend((1..=d).map(|i| format!("x{i}")));
    header.extend((1..=n).map(|i| format!("f{i}")));
    header.extend((1..=p).map(|i| format!("g{i}")));
    header.extend((1..=m).map(|i| format!("h{i}")));
    header.extend(["feasible", "alpha", "gamma", "igd_plus", "wall_time_s"].map(String::from));
    let rows = record.rows.iter().zip(&record.igd_trace).map(|(r, igd)| {
        let s = &r.sample;
        let mut row = vec![r.iteration.to_string()];
        row.extend(s.x.iter().chain(&s.f).chain(&s.g).chain(&s.h).map(|v| format_f64(*v)));
        row.push(s.feasible.to_string());
        row.push(format_f64(r.alpha));
        row.push(format_f64(r.gamma));
        row.push(opt(*igd));
        row.push(format_f64(r.wall_time_s));
        row
    });
    table(&header, rows)
}

/// `x1..xd,f1..fn,g1..gp,h1..hm`
pub fn dataset_csv(ds: &Dataset) -> String {
    let mut header: Vec<String> = (1..=ds.domain().dim()).map(|i| format!("x{i}")).collect();
    header.extend((1..=ds.n_obj()).map(|i| format!("f{i}")));
    header.extend((1..=ds.n_ineq()).map(|i| format!("g{i}")));
    header.extend((1..=ds.n_eq()).map(|i| format!("h{i}")));
    let rows = (0..ds.len()).map(|k| {
        ds.points()[k]
            .iter()
            .chain(&ds.objectives()[k])
            .chain(&ds.ineq_constraints()[k])
            .chain(&ds.eq_constraints()[k])
            .map(|v| format_f64(*v))
            .collect()
    });
    table(&header, rows)
}

/// Reads a numeric CSV with a header row.
pub fn read_points_csv(path: &Path) -> Result<Vec<Vec<f64>>, DriverError> {
    let csv_err = |message: String| DriverError::Csv {
        path: path.display().to_string(),
        message,
    };
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_err(e.to_string()))?;
    let mut out = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(e.to_string()))?;
        let row: Result<Vec<f64>, _> = rec.iter().map(|s| s.trim().parse::<f64>()).collect();
        out.push(row.map_err(|e| csv_err(format!("row {}: {e}", i + 1)))?);
    }
    Ok(out)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), DriverError> {
    let text = serde_json::to_string_pretty(value).map_err(|source| DriverError::Json {
        path: path.display().to_string(),
        source,
    })?;
    write_atomic(path, text.as_bytes())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, DriverError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|source| DriverError::Json {
        path: path.display().to_string(),
        source,
    })
}

#[derive(Serialize)]
struct Metadata<'a, C: Serialize> {
    version: &'static str,
    config: &'a C,
    seeds: Vec<u64>,
}

/// Writes `metadata.json`, `run_<seed>.json`, `rows_<seed>.csv` and
/// `front_<seed>.csv` for each record, plus `summary.json` and `trace.csv`
/// when a summary is given.
pub fn export_all(
    dir: &Path,
    config: &crate::RunConfig,
    records: &[RunRecord],
    summary: Option<&ExperimentSummary>,
) -> Result<(), DriverError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    write_json(
        &dir.join("metadata.json"),
        &Metadata {
            version: env!("CARGO_PKG_VERSION"),
            config,
            seeds: records.iter().map(|r| r.seed).collect(),
        },
    )?;
    for r in records {
        write_json(&dir.join(format!("run_{}.json", r.seed)), r)?;
        write_atomic(&dir.join(format!("rows_{}.csv", r.seed)), rows_csv(r).as_bytes())?;
        write_atomic(&dir.join(format!("front_{}.csv", r.seed)), front_csv(&r.final_front).as_bytes())?;
    }
    if let Some(s) = summary {
        write_json(&dir.join("summary.json"), s)?;
        write_atomic(&dir.join("trace.csv"), trace_csv(s).as_bytes())?;
    }
    Ok(())
}
