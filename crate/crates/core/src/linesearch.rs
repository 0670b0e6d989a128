//! Backtracking on the quadratic upper model of `f` under a diagonal metric.
//!
//! One call to [`backtrack_step`] is one outer iteration: starting from a
//! trial `L`, inflate by `η` until
//! `f(x) ≤ f(y) + ⟨∇f(y), x − y⟩ + (1/2t)‖x − y‖²_D` holds at the prox-gradient
//! point `x`. β and `D` are requested from the providers on every trial, since
//! both may depend on the trial step.

use serde::{Deserialize, Serialize};

use crate::accel::Extrapolation;
use crate::error::{Error, Result};
use crate::linalg::{dot, extrapolate};
use crate::metric::{DiagonalMetric, MetricCommit};
use crate::model::{DcProblem, SmoothOracle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BacktrackMode {
    /// Start each search from the previously accepted `L`.
    Monotone,
    /// Periodically deflate the starting `L` so steps can grow again.
    Nonmonotone,
}

/// When the non-monotone rule deflates the starting `L` by `ρ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeflateRule {
    /// Deflate unless `T1 | k` (the experimental recipe: halve on 4 of every 5 iterations).
    WhenNotDivisible,
    /// Deflate only when `T1 | k`.
    WhenDivisible,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BacktrackConfig {
    pub eta: f64,
    pub mode: BacktrackMode,
    pub t1: usize,
    pub rho: f64,
    pub l_floor: f64,
    pub l_init: f64,
    pub max_inner: usize,
    pub deflate: DeflateRule,
}

impl Default for BacktrackConfig {
    fn default() -> Self {
        Self {
            eta: 2.0,
            mode: BacktrackMode::Nonmonotone,
            t1: 5,
            rho: 0.5,
            l_floor: 1e-10,
            l_init: 1.0,
            max_inner: 100,
            deflate: DeflateRule::WhenNotDivisible,
        }
    }
}

impl BacktrackConfig {
    pub fn monotone(l_init: f64, eta: f64) -> Self {
        Self {
            eta,
            mode: BacktrackMode::Monotone,
            l_init,
            ..Self::default()
        }
    }

    pub fn nonmonotone(l_init: f64) -> Self {
        Self {
            l_init,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if !(self.eta > 1.0) {
            return bad("backtracking factor eta must exceed 1");
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return bad("deflation factor rho must lie in (0,1)");
        }
        if !(self.l_floor > 0.0) {
            return bad("L floor must be positive");
        }
        if !(self.l_init > 0.0 && self.l_init.is_finite()) {
            return bad("initial L must be positive and finite");
        }
        if self.t1 == 0 || self.max_inner == 0 {
            return bad("T1 and max_inner must be positive");
        }
        Ok(())
    }
}

/// Starting trial `L` of outer iteration `k` given the previously accepted one.
pub fn initial_l(config: &BacktrackConfig, k: usize, l_prev: f64) -> f64 {
    if k <= 1 {
        return match config.mode {
            BacktrackMode::Monotone => config.l_init,
            BacktrackMode::Nonmonotone => config.l_init.max(config.l_floor),
        };
    }
    match config.mode {
        BacktrackMode::Monotone => l_prev,
        BacktrackMode::Nonmonotone => {
            let divisible = k.is_multiple_of(config.t1);
            let deflate = match config.deflate {
                DeflateRule::WhenNotDivisible => !divisible,
                DeflateRule::WhenDivisible => divisible,
            };
            let candidate = if deflate { config.rho * l_prev } else { l_prev };
            candidate.max(config.l_floor)
        }
    }
}

fn decrease_holds(
    fx: f64,
    fy: f64,
    grad_y: &[f64],
    x: &[f64],
    y: &[f64],
    t: f64,
    d: &DiagonalMetric,
) -> bool {
    let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    let model = fy + dot(grad_y, &diff) + d.norm_sq(&diff) / (2.0 * t);
    fx <= model + 1e-12 * fy.abs().max(1.0)
}

/// The descent test, with a relative round-off slack of `1e−12 · max(1, |f(y)|)`.
pub fn sufficient_decrease(
    f: &dyn SmoothOracle,
    x: &[f64],
    y: &[f64],
    grad_y: &[f64],
    t: f64,
    metric: &DiagonalMetric,
) -> Result<bool> {
    let fx = f.value(x)?;
    let fy = f.value(y)?;
    Ok(decrease_holds(fx, fy, grad_y, x, y, t, metric))
}

/// Accepted trial of one outer iteration.
#[derive(Debug, Clone)]
pub struct LineSearchOutcome {
    pub l: f64,
    pub t: f64,
    pub x_new: Vec<f64>,
    pub f_x_new: f64,
    pub y: Vec<f64>,
    pub f_y: f64,
    pub grad_y: Vec<f64>,
    pub metric: DiagonalMetric,
    pub extrapolation: Extrapolation,
    pub n_backtracks: usize,
    /// `false` only in fixed-step mode, when the single trial violated the descent test.
    pub descent_ok: bool,
    pub(crate) metric_commit: MetricCommit,
}

impl LineSearchOutcome {
    /// Re-checks the descent inequality on the stored quantities.
    pub fn verify(&self, f: &dyn SmoothOracle) -> Result<bool> {
        sufficient_decrease(f, &self.x_new, &self.y, &self.grad_y, self.t, &self.metric)
    }
}

/// Inputs carried from the previous outer iterations.
#[derive(Debug, Clone, Copy)]
pub struct StepInputs<'a> {
    pub k: usize,
    pub l_start: f64,
    pub x_prev: &'a [f64],
    pub x_prev2: &'a [f64],
    /// `h^{k−1} ∈ ∂h(x^{k−1})`
    pub h_prev: &'a [f64],
}

struct TrialPoint {
    beta: f64,
    y: Vec<f64>,
    f_y: f64,
    grad_y: Vec<f64>,
    metric: DiagonalMetric,
    commit: MetricCommit,
}

/// Runs the inner repeat-until loop.
///
/// `beta` maps a trial step size to `(θ_k, β_k)`; `metric` maps `(y, ∇f(y))` to
/// `D_k`. With `fixed_step` the first trial is accepted whatever the outcome
/// of the descent test, which is how the fixed-`L` baselines run.
pub fn backtrack_step<B, M>(
    problem: &DcProblem,
    config: &BacktrackConfig,
    inputs: StepInputs<'_>,
    mut beta: B,
    mut metric: M,
    fixed_step: bool,
) -> Result<LineSearchOutcome>
where
    B: FnMut(f64) -> Result<Extrapolation>,
    M: FnMut(&[f64], &[f64]) -> Result<(DiagonalMetric, MetricCommit)>,
{
    let StepInputs {
        k,
        l_start,
        x_prev,
        x_prev2,
        h_prev,
    } = inputs;
    let mut l = l_start;
    let mut cached: Option<TrialPoint> = None;
    let mut last_trial = Vec::new();
    for i in 0..config.max_inner {
        if i > 0 {
            l *= config.eta;
        }
        let t = 1.0 / l;
        let ext = beta(t)?;
        // y, ∇f(y), and D only change when β does.
        let reuse = cached.as_ref().is_some_and(|c| c.beta == ext.beta);
        if !reuse {
            let z = extrapolate(x_prev, ext.beta, x_prev, x_prev2);
            let y = problem.set.project(&z);
            let (f_y, grad_y) = problem.f.value_and_gradient(&y)?;
            let (d, commit) = metric(&y, &grad_y)?;
            cached = Some(TrialPoint {
                beta: ext.beta,
                y,
                f_y,
                grad_y,
                metric: d,
                commit,
            });
        }
        let tp = cached.as_ref().expect("trial point computed above");
        let v: Vec<f64> =
            tp.y.iter()
                .zip(tp.grad_y.iter().zip(h_prev))
                .zip(tp.metric.diag())
                .map(|((yi, (gi, hi)), di)| yi - t * (gi - hi) / di)
                .collect();
        let x = problem.g.scaled_prox(&v, t, &tp.metric);
        let f_x = problem.f.value(&x)?;
        let ok = decrease_holds(f_x, tp.f_y, &tp.grad_y, &x, &tp.y, t, &tp.metric);
        if ok || fixed_step {
            let tp = cached.take().expect("trial point computed above");
            return Ok(LineSearchOutcome {
                l,
                t,
                x_new: x,
                f_x_new: f_x,
                y: tp.y,
                f_y: tp.f_y,
                grad_y: tp.grad_y,
                metric: tp.metric,
                extrapolation: ext,
                n_backtracks: i,
                descent_ok: ok,
                metric_commit: tp.commit,
            });
        }
        last_trial = x;
    }
    Err(Error::LineSearchExhausted {
        iteration: k,
        trials: config.max_inner,
        last_l: l,
        last_trial,
    })
}
