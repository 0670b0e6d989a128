use serde::{Deserialize, Serialize};
use vmdca::{relative_error, run_method, SolveResult, StopReason, StoppingRule};

use crate::config::{Dataset, RunConfig};
use crate::{CliError, Result};

/// First time a run reached one tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hit {
    pub tolerance: f64,
    pub iteration: Option<usize>,
    pub seconds: Option<f64>,
}

/// One finished (solver, seed) cell.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub solver: String,
    pub seed: u64,
    pub reference: f64,
    pub hits: Vec<Hit>,
    pub result: SolveResult,
}

/// Aggregate over seeds for one solver and tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub solver: String,
    pub tolerance: f64,
    pub mean_iterations: Option<f64>,
    pub mean_seconds: Option<f64>,
    pub hit_rate: f64,
    /// Some seed stopped at the iteration cap without reaching the tolerance.
    pub max_flag: bool,
}

#[derive(Debug, Clone)]
pub struct MatrixOutput {
    /// Reference value per seed, in seed order.
    pub references: Vec<(u64, f64)>,
    /// Cells in solver-major order.
    pub runs: Vec<RunOutcome>,
    pub summary: Vec<SummaryRow>,
}

/// Reference objective for one seed: the configured value, or the final
/// objective of the reference solver after its iteration budget.
pub fn run_reference(config: &RunConfig, data: &Dataset, seed: u64) -> Result<f64> {
    if let Some(v) = config.reference.value {
        return Ok(v);
    }
    let (problem, x0) = data.instance(seed)?;
    let method = config.reference.solver.method(config.application())?;
    let result = run_method(
        &problem,
        &method,
        &x0,
        &StoppingRule::iterations(config.reference.iterations),
    )?;
    Ok(result.f_value)
}

/// First-hit iteration and time for each tolerance.
pub fn first_hits(result: &SolveResult, reference: f64, tolerances: &[f64]) -> Vec<Hit> {
    tolerances
        .iter()
        .map(|&tol| {
            let iteration = result.first_hit(reference, tol);
            let seconds = iteration.map(|k| {
                result
                    .trace
                    .iter()
                    .find(|r| r.k == k)
                    .map_or(0.0, |r| r.wall_clock_seconds)
            });
            Hit {
                tolerance: tol,
                iteration,
                seconds,
            }
        })
        .collect()
}

fn run_cell(
    config: &RunConfig,
    data: &Dataset,
    solver: usize,
    seed: u64,
    reference: f64,
) -> Result<RunOutcome> {
    let spec = &config.solvers[solver];
    let method = spec.method(config.application())?;
    let (problem, x0) = data.instance(seed)?;
    let tightest = *config.tolerances.last().expect("validated");
    let stop = StoppingRule::relative(config.max_iter, reference, tightest);
    let result = run_method(&problem, &method, &x0, &stop)?;
    if result.stop_reason == StopReason::MaxIterations {
        log::info!(
            "{} seed {seed}: iteration cap {} reached (rel. error {:.3e})",
            spec.name(),
            config.max_iter,
            relative_error(result.f_value, reference)
        );
    }
    Ok(RunOutcome {
        solver: spec.name().to_string(),
        seed,
        reference,
        hits: first_hits(&result, reference, &config.tolerances),
        result,
    })
}

/// Runs every (solver, seed) cell against per-seed references and aggregates.
pub fn run_matrix(config: &RunConfig) -> Result<MatrixOutput> {
    config.validate()?;
    let data = config.load_data()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(e.to_string()))?;
    pool.install(|| {
        use rayon::prelude::*;
        let references = config
            .seeds
            .par_iter()
            .map(|&seed| run_reference(config, &data, seed).map(|r| (seed, r)))
            .collect::<Result<Vec<_>>>()?;
        let cells: Vec<(usize, u64, f64)> = (0..config.solvers.len())
            .flat_map(|s| references.iter().map(move |&(seed, r)| (s, seed, r)))
            .collect();
        let runs = cells
            .par_iter()
            .map(|&(s, seed, r)| run_cell(config, &data, s, seed, r))
            .collect::<Result<Vec<_>>>()?;
        let names: Vec<&str> = config.solvers.iter().map(|s| s.name()).collect();
        let per_run: Vec<(&str, &[Hit])> = runs
            .iter()
            .map(|r| (r.solver.as_str(), r.hits.as_slice()))
            .collect();
        let summary = summarize(&names, &config.tolerances, &per_run);
        Ok(MatrixOutput {
            references,
            runs,
            summary,
        })
    })
}

/// Aggregates first hits into one row per (solver, tolerance).
pub fn summarize(solvers: &[&str], tolerances: &[f64], runs: &[(&str, &[Hit])]) -> Vec<SummaryRow> {
    let mut rows = Vec::with_capacity(solvers.len() * tolerances.len());
    for &name in solvers {
        let mine: Vec<&[Hit]> = runs
            .iter()
            .filter(|(s, _)| *s == name)
            .map(|(_, h)| *h)
            .collect();
        for (i, &tol) in tolerances.iter().enumerate() {
            let done: Vec<&Hit> = mine
                .iter()
                .map(|h| &h[i])
                .filter(|h| h.iteration.is_some())
                .collect();
            let mean = |f: &dyn Fn(&Hit) -> f64| {
                (!done.is_empty())
                    .then(|| done.iter().map(|h| f(h)).sum::<f64>() / done.len() as f64)
            };
            rows.push(SummaryRow {
                solver: name.to_string(),
                tolerance: tol,
                mean_iterations: mean(&|h| h.iteration.unwrap_or(0) as f64),
                mean_seconds: mean(&|h| h.seconds.unwrap_or(0.0)),
                hit_rate: if mine.is_empty() {
                    0.0
                } else {
                    done.len() as f64 / mine.len() as f64
                },
                max_flag: done.len() < mine.len(),
            });
        }
    }
    rows
}
