use std::time::Instant;

use crate::accel::{BetaFamily, BetaSchedule, ThetaMode};
use crate::error::{check_dim, Error, Result};
use crate::linalg::dist2;
use crate::linesearch::{backtrack_step, initial_l, BacktrackConfig, StepInputs};
use crate::metric::{growth_factor, DiagonalMetric, MetricSchedule, MetricStrategy};
use crate::model::DcProblem;

use super::{
    relative_error, IterationSnapshot, SolveResult, SolverConfig, StopReason, StoppingRule,
    TraceRecord,
};

pub(super) fn check_start(problem: &DcProblem, x0: &[f64]) -> Result<f64> {
    check_dim(problem.dim(), x0.len())?;
    if !problem.set.contains(x0) {
        return Err(Error::InfeasibleStart(
            "x0 lies outside the feasible set".into(),
        ));
    }
    let f0 = problem.objective(x0)?;
    if !f0.is_finite() {
        return Err(Error::InfeasibleStart(format!("F(x0) = {f0}")));
    }
    Ok(f0)
}

/// Evaluates the stopping rule on a freshly appended trace row.
pub(super) fn should_stop(
    problem: &DcProblem,
    stop: &StoppingRule,
    record: &mut TraceRecord,
    x: &[f64],
) -> Result<Option<StopReason>> {
    if let (Some(r), Some(tol)) = (stop.reference, stop.rel_tol) {
        if relative_error(record.f_value, r) <= tol {
            return Ok(Some(StopReason::RelativeError));
        }
    }
    if let Some(target) = stop.target_objective {
        if record.f_value <= target {
            return Ok(Some(StopReason::TargetObjective));
        }
    }
    if let Some(tol) = stop.residual_tol {
        let res = problem.criticality_residual(x, stop.residual_step)?;
        record.residual = Some(res);
        if res <= tol {
            return Ok(Some(StopReason::Residual));
        }
    }
    Ok(None)
}

pub(super) fn initial_stop(stop: &StoppingRule, f0: f64) -> Option<StopReason> {
    if let (Some(r), Some(tol)) = (stop.reference, stop.rel_tol) {
        if relative_error(f0, r) <= tol {
            return Some(StopReason::RelativeError);
        }
    }
    if stop.target_objective.is_some_and(|t| f0 <= t) {
        return Some(StopReason::TargetObjective);
    }
    if stop.max_iter == 0 {
        return Some(StopReason::MaxIterations);
    }
    None
}

pub(super) fn snapshot0(x0: &[f64], f0: f64) -> IterationSnapshot {
    IterationSnapshot {
        k: 0,
        x: x0.to_vec(),
        y: x0.to_vec(),
        f_value: f0,
        theta: 1.0,
        t: 0.0,
        metric: vec![1.0; x0.len()],
    }
}

/// Shared outer loop; `fixed_l` turns off the line search.
fn run(
    problem: &DcProblem,
    config: &SolverConfig,
    x0: &[f64],
    stop: &StoppingRule,
    fixed_l: Option<f64>,
) -> Result<SolveResult> {
    config.validate()?;
    let f0 = check_start(problem, x0)?;
    let n = x0.len();
    let clock = Instant::now();

    let mut result = SolveResult {
        x: x0.to_vec(),
        f_value: f0,
        f_initial: f0,
        trace: Vec::new(),
        iterates: Vec::new(),
        stop_reason: StopReason::MaxIterations,
        descent_violations: 0,
    };
    if config.keep_iterates {
        result.iterates.push(snapshot0(x0, f0));
    }
    if let Some(reason) = initial_stop(stop, f0) {
        result.stop_reason = reason;
        return Ok(result);
    }

    let mut beta = BetaSchedule::new(
        config.beta,
        config.theta_mode(),
        config.literal_restart_divisibility,
    )?;
    let mut metric = MetricSchedule::new(config.metric, n);
    let mut x_prev = x0.to_vec();
    let mut x_prev2 = x0.to_vec();
    let mut f_prev = f0;
    let mut l_prev = fixed_l.unwrap_or(config.backtrack.l_init);
    let mut d_prev: Option<DiagonalMetric> = None;
    let zeros = vec![0.0; n];

    for k in 1..=stop.max_iter {
        let h_prev = if problem.h.is_zero() {
            zeros.clone()
        } else {
            problem.h.subgradient(&x_prev)
        };
        let l_start = fixed_l.unwrap_or_else(|| initial_l(&config.backtrack, k, l_prev));
        let out = backtrack_step(
            problem,
            &config.backtrack,
            StepInputs {
                k,
                l_start,
                x_prev: &x_prev,
                x_prev2: &x_prev2,
                h_prev: &h_prev,
            },
            |t| beta.propose(t),
            |y, g| metric.trial(k, y, g, || problem.f.split_denominator(y)),
            fixed_l.is_some(),
        )?;
        metric.commit(out.metric_commit.clone());
        let restarted = beta.commit(k, out.extrapolation, out.t, &out.x_new, &x_prev, &out.y);
        if !out.descent_ok {
            result.descent_violations += 1;
            log::warn!(
                "descent condition violated at iteration {k} with fixed L = {}",
                out.l
            );
        }

        let f_new = problem.objective_with_f(out.f_x_new, &out.x_new);
        let mut record = TraceRecord {
            k,
            f_value: f_new,
            rel_error: stop.reference.map(|r| relative_error(f_new, r)),
            l_accepted: out.l,
            t: out.t,
            n_backtracks: out.n_backtracks,
            beta_used: out.extrapolation.beta,
            restarted,
            wall_clock_seconds: 0.0,
            step_norm: dist2(&out.x_new, &x_prev),
            descent_ok: out.descent_ok,
            extrapolated: None,
            descent_slack: None,
            extrapolation_slack: None,
            metric_growth: None,
            residual: None,
            lyapunov_value: None,
        };
        if config.diagnostics {
            let d = &out.metric;
            let inv2t = 0.5 / out.t;
            record.descent_slack = Some(
                f_prev + inv2t * d.dist_sq(&x_prev, &out.y)
                    - inv2t * d.dist_sq(&out.x_new, &x_prev)
                    - f_new,
            );
            let b = out.extrapolation.beta;
            record.extrapolation_slack =
                Some(b * b * d.dist_sq(&x_prev, &x_prev2) - d.dist_sq(&x_prev, &out.y));
            record.metric_growth = d_prev.as_ref().map(|p| growth_factor(p, d));
            d_prev = Some(out.metric.clone());
        }
        if config.keep_iterates {
            result.iterates.push(IterationSnapshot {
                k,
                x: out.x_new.clone(),
                y: out.y.clone(),
                f_value: f_new,
                theta: out.extrapolation.theta,
                t: out.t,
                metric: out.metric.diag().to_vec(),
            });
        }

        x_prev2 = std::mem::replace(&mut x_prev, out.x_new);
        l_prev = out.l;
        f_prev = f_new;

        let reason = should_stop(problem, stop, &mut record, &x_prev)?;
        record.wall_clock_seconds = clock.elapsed().as_secs_f64();
        result.trace.push(record);
        if let Some(reason) = reason {
            result.stop_reason = reason;
            break;
        }
    }
    result.x = x_prev;
    result.f_value = f_prev;
    Ok(result)
}

/// Scaled proximal DC iteration with extrapolation and (non-)monotone backtracking.
pub fn spdcae_run(
    problem: &DcProblem,
    config: &SolverConfig,
    x0: &[f64],
    stop: &StoppingRule,
) -> Result<SolveResult> {
    run(problem, config, x0, stop, None)
}

/// Convex specialization: coupled θ, `β_k = (θ_{k−1} − 1)/θ_k`, no restarts.
///
/// `config.beta` and `config.theta_mode` are overridden; `h` must vanish.
pub fn sfista_run(
    problem: &DcProblem,
    config: &SolverConfig,
    x0: &[f64],
    stop: &StoppingRule,
) -> Result<SolveResult> {
    if !problem.h.is_zero() {
        return Err(Error::InvalidParameter(
            "the convex solver requires h ≡ 0".into(),
        ));
    }
    let cfg = SolverConfig {
        beta: BetaFamily::Nesterov,
        theta_mode: Some(ThetaMode::Coupled),
        ..config.clone()
    };
    run(problem, &cfg, x0, stop, None)
}

/// Fixed step `1/l_fixed`, identity metric, classical θ; no line search.
///
/// Iterations where the descent test fails at `l_fixed` are counted in
/// [`SolveResult::descent_violations`] and logged.
pub fn pdcae_run(
    problem: &DcProblem,
    l_fixed: f64,
    beta: BetaFamily,
    x0: &[f64],
    stop: &StoppingRule,
) -> Result<SolveResult> {
    if !(l_fixed > 0.0 && l_fixed.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "fixed L must be positive, got {l_fixed}"
        )));
    }
    let cfg = SolverConfig {
        backtrack: BacktrackConfig::monotone(l_fixed, 2.0),
        beta,
        theta_mode: Some(ThetaMode::Classical),
        metric: MetricStrategy::Identity,
        ..SolverConfig::default()
    };
    run(problem, &cfg, x0, stop, Some(l_fixed))
}
