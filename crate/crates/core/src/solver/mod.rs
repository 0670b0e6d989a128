//! Outer loops and their per-iteration records.

mod adca;
pub mod diagnostics;
mod engine;
pub mod presets;

use serde::{Deserialize, Serialize};

use crate::accel::{BetaFamily, ThetaMode};
use crate::error::{Error, Result};
use crate::linesearch::{BacktrackConfig, BacktrackMode};
use crate::metric::MetricStrategy;
use crate::model::DcProblem;

pub use adca::adca_run;
pub use engine::{pdcae_run, sfista_run, spdcae_run};

/// All tunables of the scaled, extrapolated proximal DC iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub backtrack: BacktrackConfig,
    pub beta: BetaFamily,
    /// Defaults to coupled θ for non-monotone backtracking and classical θ for monotone.
    pub theta_mode: Option<ThetaMode>,
    pub metric: MetricStrategy,
    /// Restart when `k | T2` instead of `T2 | k`.
    pub literal_restart_divisibility: bool,
    /// Record the per-iteration descent and extrapolation audits in the trace.
    pub diagnostics: bool,
    /// Keep every iterate (needed for the Lyapunov audit).
    pub keep_iterates: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            backtrack: BacktrackConfig::default(),
            beta: BetaFamily::FixedAdaptiveRestart { t2: 200 },
            theta_mode: None,
            metric: MetricStrategy::Identity,
            literal_restart_divisibility: false,
            diagnostics: false,
            keep_iterates: false,
        }
    }
}

impl SolverConfig {
    pub fn theta_mode(&self) -> ThetaMode {
        self.theta_mode.unwrap_or(match self.backtrack.mode {
            BacktrackMode::Nonmonotone => ThetaMode::Coupled,
            BacktrackMode::Monotone => ThetaMode::Classical,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.backtrack.validate()?;
        self.beta.validate()
    }
}

/// Disjunction of stopping tests, checked after every outer iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StoppingRule {
    pub max_iter: usize,
    /// Reference optimal value `F*` used for the relative error.
    pub reference: Option<f64>,
    /// Stop once the relative error drops to this level (needs `reference`).
    pub rel_tol: Option<f64>,
    /// Stop once `F(x^k) ≤ target`.
    pub target_objective: Option<f64>,
    /// Stop once the criticality residual drops to this level.
    pub residual_tol: Option<f64>,
    /// Step used by the criticality residual.
    pub residual_step: f64,
}

impl Default for StoppingRule {
    fn default() -> Self {
        Self {
            max_iter: 10_000,
            reference: None,
            rel_tol: None,
            target_objective: None,
            residual_tol: None,
            residual_step: 1.0,
        }
    }
}

impl StoppingRule {
    pub fn iterations(max_iter: usize) -> Self {
        Self {
            max_iter,
            ..Self::default()
        }
    }

    pub fn relative(max_iter: usize, reference: f64, rel_tol: f64) -> Self {
        Self {
            max_iter,
            reference: Some(reference),
            rel_tol: Some(rel_tol),
            ..Self::default()
        }
    }
}

/// `(F − F*)/F*` when `F* > 0`, else the plain difference `F − F*`.
pub fn relative_error(value: f64, reference: f64) -> f64 {
    if reference > 0.0 {
        (value - reference) / reference
    } else {
        value - reference
    }
}

/// One row of a solver trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub k: usize,
    pub f_value: f64,
    pub rel_error: Option<f64>,
    pub l_accepted: f64,
    pub t: f64,
    pub n_backtracks: usize,
    pub beta_used: f64,
    pub restarted: bool,
    pub wall_clock_seconds: f64,
    /// `‖x^k − x^{k−1}‖`
    pub step_norm: f64,
    /// `false` when a fixed-step method violated the descent test.
    pub descent_ok: bool,
    /// ADCA gate decision.
    pub extrapolated: Option<bool>,
    /// Slack of `F(x^k) ≤ F(x^{k−1}) + (1/2t)‖x^{k−1} − y^k‖²_D − (1/2t)‖x^k − x^{k−1}‖²_D`.
    pub descent_slack: Option<f64>,
    /// Slack of `‖x^{k−1} − y^k‖²_D ≤ β²‖x^{k−1} − x^{k−2}‖²_D`.
    pub extrapolation_slack: Option<f64>,
    /// A-posteriori metric growth factor `η` with `D_k ⪯ (1+η) D_{k−1}`.
    pub metric_growth: Option<f64>,
    pub residual: Option<f64>,
    pub lyapunov_value: Option<f64>,
}

/// Full state of an accepted iterate, kept when `keep_iterates` is set.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationSnapshot {
    pub k: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub f_value: f64,
    pub theta: f64,
    pub t: f64,
    pub metric: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    MaxIterations,
    RelativeError,
    TargetObjective,
    Residual,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub x: Vec<f64>,
    pub f_value: f64,
    pub f_initial: f64,
    pub trace: Vec<TraceRecord>,
    /// Index 0 holds `x^0`; populated only with `keep_iterates`.
    pub iterates: Vec<IterationSnapshot>,
    pub stop_reason: StopReason,
    pub descent_violations: usize,
}

impl SolveResult {
    pub fn iterations(&self) -> usize {
        self.trace.len()
    }

    /// First iteration whose relative error is at most `tol` (0 if `x^0` already qualifies).
    pub fn first_hit(&self, reference: f64, tol: f64) -> Option<usize> {
        if relative_error(self.f_initial, reference) <= tol {
            return Some(0);
        }
        self.trace
            .iter()
            .find(|r| relative_error(r.f_value, reference) <= tol)
            .map(|r| r.k)
    }
}

/// A solver selection, as named by benchmark configurations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum Method {
    Spdcae(SolverConfig),
    Sfista(SolverConfig),
    /// Fixed step `1/L`; `l_fixed` defaults to the oracle's Lipschitz hint.
    Pdcae {
        l_fixed: Option<f64>,
        #[serde(default = "default_pdcae_beta")]
        beta: BetaFamily,
    },
    Adca {
        l_fixed: Option<f64>,
        #[serde(default = "default_q")]
        q: usize,
    },
}

fn default_pdcae_beta() -> BetaFamily {
    BetaFamily::FixedAdaptiveRestart { t2: 200 }
}

fn default_q() -> usize {
    3
}

fn resolve_l(problem: &DcProblem, l_fixed: Option<f64>) -> Result<f64> {
    l_fixed
        .or_else(|| problem.f.lipschitz_hint())
        .filter(|l| *l > 0.0 && l.is_finite())
        .ok_or_else(|| {
            Error::InvalidParameter("fixed-step method needs a positive Lipschitz constant".into())
        })
}

/// Dispatches to the matching outer loop.
pub fn run_method(
    problem: &DcProblem,
    method: &Method,
    x0: &[f64],
    stop: &StoppingRule,
) -> Result<SolveResult> {
    match method {
        Method::Spdcae(cfg) => spdcae_run(problem, cfg, x0, stop),
        Method::Sfista(cfg) => sfista_run(problem, cfg, x0, stop),
        Method::Pdcae { l_fixed, beta } => {
            pdcae_run(problem, resolve_l(problem, *l_fixed)?, *beta, x0, stop)
        }
        Method::Adca { l_fixed, q } => {
            adca_run(problem, resolve_l(problem, *l_fixed)?, *q, x0, stop)
        }
    }
}
