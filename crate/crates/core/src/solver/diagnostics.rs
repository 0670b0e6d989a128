//! Runtime audits of the inequalities that drive the convergence analysis.

use crate::error::{check_dim, Error, Result};
use crate::metric::DiagonalMetric;
use crate::model::DcProblem;

use super::{IterationSnapshot, SolveResult};

/// Slack `rhs − lhs` of
/// `F(ȳ) ≤ F(x) + (1/2t)‖x − y‖²_D − (1/2t)‖x − ȳ‖²_D`,
/// where `ȳ` is the scaled prox-gradient point at `y` with `h_x ∈ ∂h(x)` and
/// the descent test holds at `(ȳ, y, t, D)`.
///
/// `h_x` is not used in the formula itself but is checked for shape, since
/// `ȳ` must have been produced with it.
pub fn descent_slack(
    problem: &DcProblem,
    x: &[f64],
    h_x: &[f64],
    y: &[f64],
    y_bar: &[f64],
    t: f64,
    metric: &DiagonalMetric,
) -> Result<f64> {
    let n = problem.dim();
    for v in [x, h_x, y, y_bar] {
        check_dim(n, v.len())?;
    }
    check_dim(n, metric.dim())?;
    let inv2t = 0.5 / t;
    Ok(problem.objective(x)? + inv2t * metric.dist_sq(x, y)
        - inv2t * metric.dist_sq(x, y_bar)
        - problem.objective(y_bar)?)
}

/// Scaled prox-gradient point `Prox^D_{tg}(y − t D⁻¹[∇f(y) − h])`.
pub fn prox_gradient_point(
    problem: &DcProblem,
    y: &[f64],
    h: &[f64],
    t: f64,
    metric: &DiagonalMetric,
) -> Result<Vec<f64>> {
    let g = problem.f.gradient(y)?;
    let v: Vec<f64> = y
        .iter()
        .zip(g.iter().zip(h))
        .zip(metric.diag())
        .map(|((yi, (gi, hi)), di)| yi - t * (gi - hi) / di)
        .collect();
    Ok(problem.g.scaled_prox(&v, t, metric))
}

/// Per-iteration Lyapunov audit of the convex accelerated iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovAudit {
    /// `rhs − lhs` of
    /// `t_k θ_k²(Φ_k − Φ*) + ½‖x* − v^k‖²_{D_k} ≤ t_{k−1}θ_{k−1}²(Φ_{k−1} − Φ*) + ½‖x* − v^{k−1}‖²_{D_k}`
    /// for `k = 1, 2, …`, with `v^k = x^{k−1} + θ_k(x^k − x^{k−1})`.
    pub slacks: Vec<f64>,
    /// `a_k = t_k θ_k²(Φ_k − Φ*) + ½‖x* − v^k‖²_{D_k}` for `k = 1, 2, …`.
    pub energies: Vec<f64>,
    /// `(1 + η_k) a_k − a_{k+1}` with the a-posteriori growth factor `η_k`, for `k = 1, 2, …`.
    pub growth_slacks: Vec<f64>,
}

/// Audits the Lyapunov inequality on the kept iterates of a convex run.
pub fn sfista_lyapunov(
    x_star: &[f64],
    phi_star: f64,
    states: &[IterationSnapshot],
) -> Result<LyapunovAudit> {
    if states.len() < 2 || states[0].k != 0 {
        return Err(Error::Missing(
            "Lyapunov audit needs the kept iterates starting at x0 (run with keep_iterates)".into(),
        ));
    }
    let n = x_star.len();
    // v^0 = x^0 because x^{−1} = x^0 and θ_0 = 1.
    let mut v_prev = states[0].x.clone();
    let mut energy_prev = 0.0; // t_0 = 0
    let mut slacks = Vec::with_capacity(states.len() - 1);
    let mut energies = Vec::with_capacity(states.len() - 1);
    let mut metrics = Vec::with_capacity(states.len() - 1);
    for w in states.windows(2) {
        let (prev, cur) = (&w[0], &w[1]);
        check_dim(n, cur.x.len())?;
        let d = DiagonalMetric::new(cur.metric.clone())?;
        let v: Vec<f64> = prev
            .x
            .iter()
            .zip(&cur.x)
            .map(|(a, b)| a + cur.theta * (b - a))
            .collect();
        let lhs =
            cur.t * cur.theta * cur.theta * (cur.f_value - phi_star) + 0.5 * d.dist_sq(x_star, &v);
        let rhs = energy_prev + 0.5 * d.dist_sq(x_star, &v_prev);
        slacks.push(rhs - lhs);
        energies.push(lhs);
        energy_prev = cur.t * cur.theta * cur.theta * (cur.f_value - phi_star);
        v_prev = v;
        metrics.push(d);
    }
    let growth_slacks = energies
        .windows(2)
        .zip(metrics.windows(2))
        .map(|(a, m)| {
            let eta = crate::metric::growth_factor(&m[0], &m[1]);
            (1.0 + eta) * a[0] - a[1]
        })
        .collect();
    Ok(LyapunovAudit {
        slacks,
        energies,
        growth_slacks,
    })
}

/// Mean of `‖x^k − x^{k−1}‖` over the first and the last tenth of a run.
pub fn step_norm_deciles(result: &SolveResult) -> Option<(f64, f64)> {
    let steps: Vec<f64> = result.trace.iter().map(|r| r.step_norm).collect();
    let tenth = steps.len() / 10;
    if tenth == 0 {
        return None;
    }
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    Some((mean(&steps[..tenth]), mean(&steps[steps.len() - tenth..])))
}

/// Smallest recorded slack of the per-iteration descent inequality, normalized
/// by `max(1, |F(x^{k−1})|)`.
pub fn min_relative_descent_slack(result: &SolveResult) -> Option<f64> {
    let mut f_prev = result.f_initial;
    let mut worst: Option<f64> = None;
    for r in &result.trace {
        if let Some(s) = r.descent_slack {
            let rel = s / f_prev.abs().max(1.0);
            worst = Some(worst.map_or(rel, |w: f64| w.min(rel)));
        }
        f_prev = r.f_value;
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{FeasibleSet, SeparableQuadratic, Zero};

    #[test]
    fn fixed_point_has_zero_slack() {
        let p = DcProblem::new(
            SeparableQuadratic::new(vec![1.0, 2.0], vec![0.5, -1.0]).unwrap(),
            Zero,
            Zero,
            FeasibleSet::WholeSpace,
        );
        let x = [0.5, -1.0];
        let d = DiagonalMetric::identity(2);
        let ybar = prox_gradient_point(&p, &x, &[0.0, 0.0], 0.5, &d).unwrap();
        assert_eq!(ybar, x.to_vec());
        assert_eq!(
            descent_slack(&p, &x, &[0.0, 0.0], &x, &ybar, 0.5, &d).unwrap(),
            0.0
        );
    }

    #[test]
    fn quadratic_slack_is_nonnegative() {
        let l = 3.0;
        let p = DcProblem::new(
            SeparableQuadratic::new(vec![l, 1.0, 0.2], vec![1.0, 2.0, 3.0]).unwrap(),
            Zero,
            Zero,
            FeasibleSet::WholeSpace,
        );
        let d = DiagonalMetric::identity(3);
        let zero = [0.0; 3];
        for (x, y) in [
            ([0.0, 0.0, 0.0], [1.0, -1.0, 2.0]),
            ([5.0, 1.0, -2.0], [0.3, 0.3, 0.3]),
            ([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]),
        ] {
            let ybar = prox_gradient_point(&p, &y, &zero, 1.0 / l, &d).unwrap();
            let s = descent_slack(&p, &x, &zero, &y, &ybar, 1.0 / l, &d).unwrap();
            assert!(s >= -1e-12, "slack {s}");
        }
    }

    #[test]
    fn lyapunov_needs_states() {
        assert!(sfista_lyapunov(&[0.0], 0.0, &[]).is_err());
    }
}
