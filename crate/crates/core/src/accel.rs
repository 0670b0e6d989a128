//! Extrapolation schedules: the θ recursions and the β families built on them.
//!
//! With `θ₀ = 1` and `t₀ = 0`, iteration `k` computes `θ_k` and uses
//! `β_k = (θ_{k−1} − 1) / θ_k` (times δ for the contract family). A restart
//! puts the recursion back into its initial state, so the next two emitted
//! β are zero, exactly as at start-up.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::dot;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThetaMode {
    /// `θ_k = (1 + sqrt(1 + 4 θ_{k−1}² t_{k−1}/t_k)) / 2`
    Coupled,
    /// `θ_k = (1 + sqrt(1 + 4 θ_{k−1}²)) / 2`
    Classical,
}

/// Positive root of the θ recursion.
pub fn theta_next(mode: ThetaMode, theta_prev: f64, t_prev: f64, t_cur: f64) -> Result<f64> {
    if !(t_cur > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "step size must be positive, got {t_cur}"
        )));
    }
    let ratio = match mode {
        ThetaMode::Coupled => t_prev / t_cur,
        ThetaMode::Classical => 1.0,
    };
    Ok(0.5 * (1.0 + (1.0 + 4.0 * theta_prev * theta_prev * ratio).sqrt()))
}

/// Committed θ history: `θ_{k−1}` and `t_{k−1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaState {
    pub theta_prev: f64,
    pub t_prev: f64,
    pub mode: ThetaMode,
    /// Set at start-up and after a restart: the next θ is 1.
    pub fresh: bool,
}

impl ThetaState {
    pub fn new(mode: ThetaMode) -> Self {
        Self {
            theta_prev: 1.0,
            t_prev: 0.0,
            mode,
            fresh: true,
        }
    }

    /// `θ_k` for a trial step size `t_cur`.
    pub fn next(&self, t_cur: f64) -> Result<f64> {
        if self.fresh {
            if !(t_cur > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "step size must be positive, got {t_cur}"
                )));
            }
            return Ok(1.0);
        }
        theta_next(self.mode, self.theta_prev, self.t_prev, t_cur)
    }

    pub fn advance(&mut self, theta: f64, t: f64) {
        self.theta_prev = theta;
        self.t_prev = t;
        self.fresh = false;
    }

    pub fn reset(&mut self) {
        *self = Self::new(self.mode);
    }
}

/// How `β_k` is derived from the θ sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BetaFamily {
    /// `β ≡ 0` (no extrapolation).
    Zero,
    /// `β_k = (θ_{k−1} − 1)/θ_k` without restarts.
    Nesterov,
    /// `β_k = δ (θ_{k−1} − 1)/θ_k`.
    Contract { delta: f64 },
    /// Reset θ every `t2` iterations.
    FixedRestart { t2: usize },
    /// Reset θ every `t2` iterations or when `⟨x_k − x_{k−1}, y_k − x_k⟩ > 0`.
    FixedAdaptiveRestart { t2: usize },
}

impl BetaFamily {
    pub fn validate(&self) -> Result<()> {
        match *self {
            BetaFamily::Contract { delta } if !(delta > 0.0 && delta < 1.0) => Err(
                Error::InvalidParameter(format!("contract factor must lie in (0,1), got {delta}")),
            ),
            BetaFamily::FixedRestart { t2 } | BetaFamily::FixedAdaptiveRestart { t2 }
                if t2 == 0 =>
            {
                Err(Error::InvalidParameter(
                    "restart period must be positive".into(),
                ))
            }
            _ => Ok(()),
        }
    }
}

/// `δ (θ_{k−1} − 1) / θ_k`
pub fn beta_contract(theta_prev: f64, theta: f64, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "contract factor must lie in (0,1), got {delta}"
        )));
    }
    Ok(delta * (theta_prev - 1.0) / theta)
}

/// `(θ_{k−1} − 1) / θ_k`
pub fn beta_plain(theta_prev: f64, theta: f64) -> f64 {
    (theta_prev - 1.0) / theta
}

/// Restart test after iteration `k`.
///
/// The periodic test fires when `t2` divides `k`; `literal_divisibility` flips
/// it to "k divides t2".
pub fn restart_condition(
    k: usize,
    t2: usize,
    adaptive: bool,
    literal_divisibility: bool,
    x_k: &[f64],
    x_prev: &[f64],
    y_k: &[f64],
) -> bool {
    let periodic = if literal_divisibility {
        k > 0 && t2.is_multiple_of(k)
    } else {
        t2 > 0 && k.is_multiple_of(t2)
    };
    if periodic {
        return true;
    }
    adaptive && {
        let step: Vec<f64> = x_k.iter().zip(x_prev).map(|(a, b)| a - b).collect();
        let gap: Vec<f64> = y_k.iter().zip(x_k).map(|(a, b)| a - b).collect();
        dot(&step, &gap) > 0.0
    }
}

/// A proposed `(θ_k, β_k)` for one trial step size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolation {
    pub theta: f64,
    pub beta: f64,
}

/// Upper bound applied to β for the families that require `β ∈ [0, 1)`.
///
/// With coupled θ a shrinking step-size ratio can push `(θ_{k−1} − 1)/θ_k`
/// above 1; the plain Nesterov family is left uncapped because its rate
/// analysis needs the exact value.
pub const BETA_CAP: f64 = 1.0 - 1e-6;

/// Per-run β producer.
#[derive(Debug, Clone)]
pub struct BetaSchedule {
    family: BetaFamily,
    theta: ThetaState,
    literal_divisibility: bool,
}

impl BetaSchedule {
    pub fn new(family: BetaFamily, mode: ThetaMode, literal_divisibility: bool) -> Result<Self> {
        family.validate()?;
        Ok(Self {
            family,
            theta: ThetaState::new(mode),
            literal_divisibility,
        })
    }

    pub fn family(&self) -> BetaFamily {
        self.family
    }

    pub fn theta_state(&self) -> &ThetaState {
        &self.theta
    }

    /// Whether β can change with the trial step size inside one outer iteration.
    pub fn depends_on_step(&self) -> bool {
        self.family != BetaFamily::Zero && self.theta.mode == ThetaMode::Coupled
    }

    pub fn propose(&self, t_trial: f64) -> Result<Extrapolation> {
        let theta = self.theta.next(t_trial)?;
        let plain = beta_plain(self.theta.theta_prev, theta);
        let beta = match self.family {
            BetaFamily::Zero => 0.0,
            BetaFamily::Nesterov => plain,
            BetaFamily::Contract { delta } => {
                // Validates δ; the cap is applied before contracting.
                beta_contract(self.theta.theta_prev, theta, delta)?;
                delta * plain.min(BETA_CAP)
            }
            BetaFamily::FixedRestart { .. } | BetaFamily::FixedAdaptiveRestart { .. } => {
                plain.min(BETA_CAP)
            }
        };
        Ok(Extrapolation { theta, beta })
    }

    /// Commits the accepted iteration and applies the restart rule. Returns whether θ was reset.
    pub fn commit(
        &mut self,
        k: usize,
        accepted: Extrapolation,
        t: f64,
        x_k: &[f64],
        x_prev: &[f64],
        y_k: &[f64],
    ) -> bool {
        self.theta.advance(accepted.theta, t);
        let restart = match self.family {
            BetaFamily::FixedRestart { t2 } => {
                restart_condition(k, t2, false, self.literal_divisibility, x_k, x_prev, y_k)
            }
            BetaFamily::FixedAdaptiveRestart { t2 } => {
                restart_condition(k, t2, true, self.literal_divisibility, x_k, x_prev, y_k)
            }
            _ => false,
        };
        if restart {
            self.theta.reset();
        }
        restart
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const PHI: f64 = 1.618_033_988_749_895;

    #[test]
    fn theta_examples() {
        let t = theta_next(ThetaMode::Coupled, 1.0, 0.3, 0.3).unwrap();
        assert!((t - PHI).abs() < 1e-15);
        assert_eq!(theta_next(ThetaMode::Coupled, 1.0, 0.0, 0.3).unwrap(), 1.0);
        let t = theta_next(ThetaMode::Classical, 1.6180, 5.0, 1.0).unwrap();
        let expected = (1.0 + (1.0 + 4.0 * 1.6180f64 * 1.6180).sqrt()) / 2.0;
        assert!((t - expected).abs() < 1e-15);
        assert!((t - 2.1935).abs() < 1e-4);
        assert!(theta_next(ThetaMode::Coupled, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn contract_examples() {
        assert_eq!(beta_contract(1.0, 1.7, 0.9).unwrap(), 0.0);
        let b = beta_contract(1.618, 2.189, 0.99).unwrap();
        assert!((b - 0.2795).abs() < 1e-4);
        assert!(beta_contract(1.5, 2.0, 1.0).is_err());
        assert!(beta_contract(1.5, 2.0, 0.0).is_err());
    }

    #[test]
    fn first_two_betas_are_zero() {
        let mut s = BetaSchedule::new(
            BetaFamily::Contract { delta: 0.99 },
            ThetaMode::Coupled,
            false,
        )
        .unwrap();
        let x = [0.0];
        let e1 = s.propose(1.0).unwrap();
        assert_eq!((e1.theta, e1.beta), (1.0, 0.0));
        s.commit(1, e1, 1.0, &x, &x, &x);
        let e2 = s.propose(1.0).unwrap();
        assert!((e2.theta - PHI).abs() < 1e-15);
        assert_eq!(e2.beta, 0.0);
        s.commit(2, e2, 1.0, &x, &x, &x);
        let e3 = s.propose(1.0).unwrap();
        assert!((e3.beta - 0.99 * (PHI - 1.0) / e3.theta).abs() < 1e-15);
    }

    #[test]
    fn periodic_restart_every_t2() {
        let mut s = BetaSchedule::new(
            BetaFamily::FixedRestart { t2: 3 },
            ThetaMode::Classical,
            false,
        )
        .unwrap();
        let x = [0.0];
        let mut restarts = Vec::new();
        for k in 1..=7 {
            let e = s.propose(1.0).unwrap();
            if restarts.last() == Some(&(k - 1)) {
                assert_eq!(e.beta, 0.0);
            }
            if s.commit(k, e, 1.0, &x, &x, &x) {
                restarts.push(k);
            }
        }
        assert_eq!(restarts, vec![3, 6]);
    }

    #[test]
    fn literal_divisibility_switch() {
        let x = [0.0];
        let fired: Vec<usize> = (1..=12)
            .filter(|&k| restart_condition(k, 4, false, true, &x, &x, &x))
            .collect();
        assert_eq!(fired, vec![1, 2, 4]);
    }

    #[test]
    fn adaptive_restart_trigger() {
        assert!(!restart_condition(
            1,
            200,
            true,
            false,
            &[1.0],
            &[1.0],
            &[5.0]
        ));
        assert!(restart_condition(
            1,
            200,
            true,
            false,
            &[1.0],
            &[0.0],
            &[2.0]
        ));
        assert!(!restart_condition(
            1,
            200,
            false,
            false,
            &[1.0],
            &[0.0],
            &[2.0]
        ));
    }

    #[test]
    fn coupled_with_constant_steps_equals_classical() {
        let mut c = ThetaState::new(ThetaMode::Coupled);
        let mut d = ThetaState::new(ThetaMode::Classical);
        for _ in 0..200 {
            let a = c.next(0.25).unwrap();
            let b = d.next(0.25).unwrap();
            assert_eq!(a, b);
            c.advance(a, 0.25);
            d.advance(b, 0.25);
        }
    }

    #[test]
    fn classical_theta_grows_linearly() {
        let mut s = ThetaState::new(ThetaMode::Classical);
        for k in 1..=10_000usize {
            let th = s.next(1.0).unwrap();
            assert!(th >= (k as f64 + 1.0) / 2.0 - 1e-12, "k={k} theta={th}");
            s.advance(th, 1.0);
        }
    }

    proptest! {
        #[test]
        fn coupled_identity_and_beta_range(steps in proptest::collection::vec(1e-3f64..1e3, 2..60)) {
            let mut s = BetaSchedule::new(BetaFamily::Nesterov, ThetaMode::Coupled, false).unwrap();
            let mut r = BetaSchedule::new(BetaFamily::FixedRestart { t2: 1000 }, ThetaMode::Coupled, false).unwrap();
            let mut c = BetaSchedule::new(BetaFamily::Contract { delta: 0.9 }, ThetaMode::Coupled, false).unwrap();
            let x = [0.0];
            for (k, &t) in steps.iter().enumerate() {
                let st = *s.theta_state();
                let e = s.propose(t).unwrap();
                let er = r.propose(t).unwrap();
                let ec = c.propose(t).unwrap();
                prop_assert!(e.theta >= 1.0);
                prop_assert!(e.beta >= 0.0);
                prop_assert!((0.0..1.0).contains(&er.beta));
                prop_assert!((0.0..1.0).contains(&ec.beta));
                prop_assert!(ec.beta <= 0.9 * er.beta + 1e-15);
                if !st.fresh {
                    let lhs = e.theta * e.theta - e.theta - st.t_prev / t * st.theta_prev * st.theta_prev;
                    prop_assert!(lhs.abs() <= 1e-12 * e.theta * e.theta);
                }
                s.commit(k + 1, e, t, &x, &x, &x);
                r.commit(k + 1, er, t, &x, &x, &x);
                c.commit(k + 1, ec, t, &x, &x, &x);
            }
        }
    }
}
