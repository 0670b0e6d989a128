use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use vmdca::{relative_error, SolveResult};

use crate::run::{MatrixOutput, SummaryRow};
use crate::Result;

/// One line of a per-run trace file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub k: usize,
    #[serde(rename = "F")]
    pub f: f64,
    pub rel_err: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub t: f64,
    pub backtracks: usize,
    pub beta: f64,
    pub restarted: bool,
    pub seconds: f64,
}

pub fn trace_rows(result: &SolveResult, reference: f64) -> Vec<TraceRow> {
    result
        .trace
        .iter()
        .map(|r| TraceRow {
            k: r.k,
            f: r.f_value,
            rel_err: relative_error(r.f_value, reference),
            l: r.l_accepted,
            t: r.t,
            backtracks: r.n_backtracks,
            beta: r.beta_used,
            restarted: r.restarted,
            seconds: r.wall_clock_seconds,
        })
        .collect()
}

pub fn write_trace_csv(path: &Path, result: &SolveResult, reference: f64) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in trace_rows(result, reference) {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trace_csv(path: &Path) -> Result<Vec<TraceRow>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

pub fn write_summary_csv(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_summary_csv(path: &Path) -> Result<Vec<SummaryRow>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text =
        serde_json::to_string_pretty(value).map_err(|e| crate::CliError::Output(e.to_string()))?;
    fs::write(path, text + "\n")?;
    Ok(())
}

#[derive(Serialize)]
struct ReferenceEntry {
    seed: u64,
    value: f64,
}

/// Writes `traces/<solver>_seed<seed>.csv`, `summary.csv`, `summary.json`,
/// and `references.json` under `dir`.
pub fn write_outputs(dir: &Path, out: &MatrixOutput) -> Result<()> {
    let traces = dir.join("traces");
    fs::create_dir_all(&traces)?;
    for run in &out.runs {
        let name = format!("{}_seed{}.csv", run.solver, run.seed);
        write_trace_csv(&traces.join(name), &run.result, run.reference)?;
    }
    write_summary_csv(&dir.join("summary.csv"), &out.summary)?;
    write_json(&dir.join("summary.json"), &out.summary)?;
    write_references(dir, &out.references)
}

pub fn write_references(dir: &Path, references: &[(u64, f64)]) -> Result<()> {
    fs::create_dir_all(dir)?;
    let entries: Vec<ReferenceEntry> = references
        .iter()
        .map(|&(seed, value)| ReferenceEntry { seed, value })
        .collect();
    write_json(&dir.join("references.json"), &entries)
}
