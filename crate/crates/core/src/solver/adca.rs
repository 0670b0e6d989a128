use std::collections::VecDeque;
use std::time::Instant;

use crate::accel::{BetaFamily, BetaSchedule, ThetaMode};
use crate::error::{Error, Result};
use crate::linalg::{dist2, dot, extrapolate};
use crate::metric::DiagonalMetric;
use crate::model::DcProblem;

use super::engine::{check_start, initial_stop, should_stop};
use super::{relative_error, SolveResult, StopReason, StoppingRule, TraceRecord};

/// Accelerated DCA with a non-monotone extrapolation gate.
///
/// Each iteration forms `z^k = Π_Y(x^k + β_k(x^k − x^{k−1}))` and uses it as
/// the base point only if `F(z^k)` does not exceed the largest of the last
/// `q + 1` objective values; otherwise the step is based at `x^k`. The step
/// itself is the fixed-`L` proximal DCA step, with `h` linearized at the base
/// point. θ follows the classical recursion without restarts.
pub fn adca_run(
    problem: &DcProblem,
    l_fixed: f64,
    q: usize,
    x0: &[f64],
    stop: &StoppingRule,
) -> Result<SolveResult> {
    if !(l_fixed > 0.0 && l_fixed.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "fixed L must be positive, got {l_fixed}"
        )));
    }
    let f0 = check_start(problem, x0)?;
    let n = x0.len();
    let clock = Instant::now();
    let t = 1.0 / l_fixed;
    let identity = DiagonalMetric::identity(n);

    let mut result = SolveResult {
        x: x0.to_vec(),
        f_value: f0,
        f_initial: f0,
        trace: Vec::new(),
        iterates: Vec::new(),
        stop_reason: StopReason::MaxIterations,
        descent_violations: 0,
    };
    if let Some(reason) = initial_stop(stop, f0) {
        result.stop_reason = reason;
        return Ok(result);
    }

    let mut beta = BetaSchedule::new(BetaFamily::Nesterov, ThetaMode::Classical, false)?;
    let mut history: VecDeque<f64> = VecDeque::with_capacity(q + 2);
    history.push_back(f0);
    let mut x_prev = x0.to_vec();
    let mut x_prev2 = x0.to_vec();
    let mut f_prev = f0;

    for k in 1..=stop.max_iter {
        let ext = beta.propose(t)?;
        let z = problem
            .set
            .project(&extrapolate(&x_prev, ext.beta, &x_prev, &x_prev2));
        let f_z = problem.objective(&z)?;
        let gate = history.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let extrapolated = f_z <= gate;
        let base = if extrapolated { z } else { x_prev.clone() };

        let (f_base, grad) = problem.f.value_and_gradient(&base)?;
        let h_base = if problem.h.is_zero() {
            vec![0.0; n]
        } else {
            problem.h.subgradient(&base)
        };
        let v: Vec<f64> = base
            .iter()
            .zip(grad.iter().zip(&h_base))
            .map(|(b, (g, h))| b - t * (g - h))
            .collect();
        let x_new = problem.g.scaled_prox(&v, t, &identity);
        let f_x = problem.f.value(&x_new)?;
        let diff: Vec<f64> = x_new.iter().zip(&base).map(|(a, b)| a - b).collect();
        let descent_ok = f_x
            <= f_base
                + dot(&grad, &diff)
                + 0.5 * l_fixed * dot(&diff, &diff)
                + 1e-12 * f_base.abs().max(1.0);
        if !descent_ok {
            result.descent_violations += 1;
            log::warn!("descent condition violated at iteration {k} with fixed L = {l_fixed}");
        }
        beta.commit(k, ext, t, &x_new, &x_prev, &base);

        let f_new = problem.objective_with_f(f_x, &x_new);
        history.push_back(f_new);
        while history.len() > q + 1 {
            history.pop_front();
        }
        let mut record = TraceRecord {
            k,
            f_value: f_new,
            rel_error: stop.reference.map(|r| relative_error(f_new, r)),
            l_accepted: l_fixed,
            t,
            n_backtracks: 0,
            beta_used: if extrapolated { ext.beta } else { 0.0 },
            restarted: false,
            wall_clock_seconds: 0.0,
            step_norm: dist2(&x_new, &x_prev),
            descent_ok,
            extrapolated: Some(extrapolated),
            descent_slack: None,
            extrapolation_slack: None,
            metric_growth: None,
            residual: None,
            lyapunov_value: None,
        };
        x_prev2 = std::mem::replace(&mut x_prev, x_new);
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
