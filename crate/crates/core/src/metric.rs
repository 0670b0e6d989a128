//! Diagonal variable metrics and the schedules that produce them.
//!
//! Every metric handed to the solver is clamped into the band `[1/γ_k, γ_k]`
//! with `γ_k = sqrt(1 + c / (k+1)²)`. The band shrinks to `{1}`, so the
//! produced metrics tend to the identity and their per-step growth factors
//! are summable.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Positive diagonal matrix `D`, stored as its diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalMetric(Vec<f64>);

impl DiagonalMetric {
    pub fn new(diag: Vec<f64>) -> Result<Self> {
        if let Some(bad) = diag.iter().find(|d| !(d.is_finite() && **d > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "metric entries must be positive and finite, found {bad}"
            )));
        }
        Ok(Self(diag))
    }

    pub fn identity(n: usize) -> Self {
        Self(vec![1.0; n])
    }

    pub fn diag(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&d| d == 1.0)
    }

    /// `‖v‖²_D = Σ dᵢ vᵢ²`
    pub fn norm_sq(&self, v: &[f64]) -> f64 {
        self.0.iter().zip(v).map(|(d, x)| d * x * x).sum()
    }

    /// `‖a − b‖²_D`
    pub fn dist_sq(&self, a: &[f64], b: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(a.iter().zip(b))
            .map(|(d, (x, y))| d * (x - y) * (x - y))
            .sum()
    }

    /// `⟨a, D b⟩`
    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(a.iter().zip(b))
            .map(|(d, (x, y))| d * x * y)
            .sum()
    }

    /// `D⁻¹ v`
    pub fn solve(&self, v: &[f64]) -> Vec<f64> {
        v.iter().zip(&self.0).map(|(x, d)| x / d).collect()
    }

    pub fn min_entry(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Clamp half-width `γ_k = sqrt(1 + numerator / (k+1)²)`.
pub fn gamma(k: usize, clamp_numerator: f64) -> f64 {
    let kp1 = (k + 1) as f64;
    (1.0 + clamp_numerator / (kp1 * kp1)).sqrt()
}

/// `max(lower, min(upper, v))`, in that order.
fn clamp_band(v: f64, gamma_k: f64) -> f64 {
    (1.0 / gamma_k).max(gamma_k.min(v))
}

/// Which rule produces `D_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MetricStrategy {
    Identity,
    /// Square root of the accumulated squared gradients, clamped.
    Adagrad {
        #[serde(default = "default_epsilon")]
        epsilon: f64,
        #[serde(default = "default_clamp_numerator")]
        clamp_numerator: f64,
    },
    /// Inverse of the clamped ratio `y / V(y)` from a split `−∇f = U − V`.
    SplitGradient {
        #[serde(default = "default_clamp_numerator")]
        clamp_numerator: f64,
    },
}

fn default_epsilon() -> f64 {
    1e-6
}

fn default_clamp_numerator() -> f64 {
    1e13
}

impl MetricStrategy {
    pub fn adagrad() -> Self {
        MetricStrategy::Adagrad {
            epsilon: default_epsilon(),
            clamp_numerator: default_clamp_numerator(),
        }
    }

    pub fn split_gradient() -> Self {
        MetricStrategy::SplitGradient {
            clamp_numerator: default_clamp_numerator(),
        }
    }

    /// Documented lower spectral bound μ of all produced metrics.
    pub fn mu(&self) -> f64 {
        match *self {
            MetricStrategy::Identity => 1.0,
            MetricStrategy::Adagrad {
                epsilon,
                clamp_numerator,
            } => (1.0 / gamma(1, clamp_numerator)).min(epsilon.sqrt()),
            MetricStrategy::SplitGradient { clamp_numerator } => 1.0 / gamma(1, clamp_numerator),
        }
    }
}

/// Stateful producer of `D_k` for one solver run.
#[derive(Debug, Clone)]
pub struct MetricSchedule {
    strategy: MetricStrategy,
    accumulator: Vec<f64>,
}

impl MetricSchedule {
    pub fn new(strategy: MetricStrategy, n: usize) -> Self {
        let accumulator = match strategy {
            MetricStrategy::Adagrad { .. } => vec![0.0; n],
            _ => Vec::new(),
        };
        Self {
            strategy,
            accumulator,
        }
    }

    pub fn strategy(&self) -> MetricStrategy {
        self.strategy
    }

    pub fn accumulator(&self) -> &[f64] {
        &self.accumulator
    }

    /// Adds `g ⊙ g` to the accumulator and returns the clamped AdaGrad metric.
    pub fn adagrad_metric(&mut self, k: usize, grad: &[f64]) -> Result<DiagonalMetric> {
        let (metric, acc) = self.adagrad_trial(k, grad)?;
        self.accumulator = acc;
        Ok(metric)
    }

    fn adagrad_trial(&self, k: usize, grad: &[f64]) -> Result<(DiagonalMetric, Vec<f64>)> {
        let MetricStrategy::Adagrad {
            epsilon,
            clamp_numerator,
        } = self.strategy
        else {
            return Err(Error::InvalidParameter(
                "adagrad_metric called on a non-adagrad schedule".into(),
            ));
        };
        check_dim(self.accumulator.len(), grad.len())?;
        let g = gamma(k, clamp_numerator);
        let acc: Vec<f64> = self
            .accumulator
            .iter()
            .zip(grad)
            .map(|(a, gi)| a + gi * gi)
            .collect();
        let diag = acc
            .iter()
            .map(|a| clamp_band((a + epsilon).sqrt(), g))
            .collect();
        Ok((DiagonalMetric(diag), acc))
    }

    /// Metric for iteration `k` at the extrapolated point `y`.
    ///
    /// Nothing is committed; pass the returned token to [`MetricSchedule::commit`]
    /// once the trial step is accepted. `split` is only consulted by the
    /// split-gradient strategy and must return `V(y)`.
    pub fn trial(
        &self,
        k: usize,
        y: &[f64],
        grad_y: &[f64],
        split_v: impl FnOnce() -> Option<Result<Vec<f64>>>,
    ) -> Result<(DiagonalMetric, MetricCommit)> {
        match self.strategy {
            MetricStrategy::Identity => Ok((DiagonalMetric::identity(y.len()), MetricCommit(None))),
            MetricStrategy::Adagrad { .. } => {
                let (m, acc) = self.adagrad_trial(k, grad_y)?;
                Ok((m, MetricCommit(Some(acc))))
            }
            MetricStrategy::SplitGradient { clamp_numerator } => {
                let v = split_v().ok_or_else(|| {
                    Error::InvalidParameter(
                        "split-gradient metric requires a smooth oracle with a gradient split"
                            .into(),
                    )
                })??;
                Ok((
                    split_gradient_metric(k, y, &v, clamp_numerator)?,
                    MetricCommit(None),
                ))
            }
        }
    }

    pub fn commit(&mut self, token: MetricCommit) {
        if let Some(acc) = token.0 {
            self.accumulator = acc;
        }
    }
}

/// Pending state change from [`MetricSchedule::trial`].
#[derive(Debug, Clone)]
pub struct MetricCommit(pub(crate) Option<Vec<f64>>);

/// `D = diag(clamp(y / V, 1/γ_k, γ_k))⁻¹`; the clamp applies to the ratio before inversion.
pub fn split_gradient_metric(
    k: usize,
    y: &[f64],
    v: &[f64],
    clamp_numerator: f64,
) -> Result<DiagonalMetric> {
    check_dim(y.len(), v.len())?;
    if let Some((i, vi)) = v.iter().enumerate().find(|(_, vi)| !(**vi > 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "split denominator V must be strictly positive, V[{i}] = {vi}"
        )));
    }
    let g = gamma(k, clamp_numerator);
    let diag = y
        .iter()
        .zip(v)
        .map(|(yi, vi)| 1.0 / clamp_band(yi / vi, g))
        .collect();
    Ok(DiagonalMetric(diag))
}

/// Whether `D_next ⪯ (1+η) D_prev` (componentwise for diagonal metrics).
pub fn check_schedule_growth(
    prev: &DiagonalMetric,
    next: &DiagonalMetric,
    eta: f64,
) -> Result<bool> {
    check_dim(prev.dim(), next.dim())?;
    Ok(prev
        .0
        .iter()
        .zip(&next.0)
        .all(|(p, n)| *n <= (1.0 + eta) * p))
}

/// Smallest `η ≥ 0` with `D_next ⪯ (1+η) D_prev`.
pub fn growth_factor(prev: &DiagonalMetric, next: &DiagonalMetric) -> f64 {
    let ratio = prev
        .0
        .iter()
        .zip(&next.0)
        .map(|(p, n)| n / p)
        .fold(0.0, f64::max);
    (ratio - 1.0).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn gamma_values() {
        assert_eq!(gamma(1, 0.0), 1.0);
        let g1 = gamma(1, 1e13);
        assert!((g1 - (1.0 + 1e13 / 4.0f64).sqrt()).abs() < 1e-6);
        assert!((g1 - 1.5811e6).abs() / 1.5811e6 < 1e-4);
        let g = gamma(99_999_999, 1e13);
        assert!((g - 1.001f64.sqrt()).abs() < 1e-12);
        assert!(gamma(100_000_000, 1e13) < g);
    }

    #[test]
    fn adagrad_first_step_is_sqrt_epsilon() {
        let mut s = MetricSchedule::new(MetricStrategy::adagrad(), 2);
        let d = s.adagrad_metric(1, &[0.0, 0.0]).unwrap();
        for &di in d.diag() {
            assert!((di - 1e-3).abs() < 1e-15);
        }
    }

    #[test]
    fn adagrad_upper_clamp() {
        let mut s = MetricSchedule::new(MetricStrategy::adagrad(), 2);
        s.accumulator = vec![1e20, 1e20];
        let k = 100_000_000;
        let d = s.adagrad_metric(k, &[0.0, 0.0]).unwrap();
        let g = gamma(k, 1e13);
        assert!(d.diag().iter().all(|&x| x == g));
    }

    #[test]
    fn adagrad_preserves_anisotropy_and_accumulates() {
        let mut s = MetricSchedule::new(MetricStrategy::adagrad(), 2);
        let d = s.adagrad_metric(1, &[0.0, 3.0]).unwrap();
        assert!((d.diag()[0] - 1e-3).abs() < 1e-15);
        assert!((d.diag()[1] - (9.0f64 + 1e-6).sqrt()).abs() < 1e-12);
        assert_eq!(s.accumulator(), &[0.0, 9.0]);
        let d = s.adagrad_metric(2, &[0.0, 4.0]).unwrap();
        assert!((d.diag()[1] - (25.0f64 + 1e-6).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn trial_does_not_commit_until_asked() {
        let s0 = MetricSchedule::new(MetricStrategy::adagrad(), 1);
        let mut s = s0.clone();
        let (_, tok) = s.trial(1, &[0.0], &[2.0], || None).unwrap();
        assert_eq!(s.accumulator(), &[0.0]);
        s.commit(tok);
        assert_eq!(s.accumulator(), &[4.0]);
    }

    #[test]
    fn split_gradient_examples() {
        let d = split_gradient_metric(5, &[1.0, 2.0], &[1.0, 2.0], 1e13).unwrap();
        assert_eq!(d.diag(), &[1.0, 1.0]);

        let k = 3;
        let d = split_gradient_metric(k, &[0.0, 1.0], &[1.0, 1.0], 1e13).unwrap();
        assert!((d.diag()[0] - gamma(k, 1e13)).abs() < 1e-9 * gamma(k, 1e13));

        // γ_k = 3 needs numerator = 8 (k+1)².
        let k = 10;
        let numerator = 8.0 * 121.0;
        assert!((gamma(k, numerator) - 3.0).abs() < 1e-12);
        let d = split_gradient_metric(k, &[2.0, 8.0], &[1.0, 2.0], numerator).unwrap();
        assert!((d.diag()[0] - 0.5).abs() < 1e-12);
        assert!((d.diag()[1] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn split_gradient_rejects_nonpositive_v() {
        assert!(split_gradient_metric(1, &[1.0], &[0.0], 1e13).is_err());
        assert!(split_gradient_metric(1, &[1.0], &[-1.0], 1e13).is_err());
    }

    #[test]
    fn schedule_growth_examples() {
        let p = DiagonalMetric::new(vec![1.0, 2.0]).unwrap();
        assert!(check_schedule_growth(&p, &p, 0.0).unwrap());
        let twice = DiagonalMetric::new(vec![2.0, 4.0]).unwrap();
        assert!(!check_schedule_growth(&p, &twice, 0.5).unwrap());
        let slight = DiagonalMetric::new(vec![1.1, 2.2]).unwrap();
        assert!(check_schedule_growth(&p, &slight, 0.2).unwrap());
        assert!((growth_factor(&p, &slight) - 0.1).abs() < 1e-12);
        let short = DiagonalMetric::identity(3);
        assert!(check_schedule_growth(&p, &short, 0.0).is_err());
    }

    #[test]
    fn metric_rejects_nonpositive() {
        assert!(DiagonalMetric::new(vec![1.0, 0.0]).is_err());
        assert!(DiagonalMetric::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn mu_bounds() {
        let a = MetricStrategy::adagrad();
        assert_eq!(a.mu(), 1.0 / gamma(1, 1e13));
        let a = MetricStrategy::Adagrad {
            epsilon: 1e-6,
            clamp_numerator: 0.0,
        };
        assert_eq!(a.mu(), 1e-3);
    }

    proptest! {
        #[test]
        fn gamma_is_monotone(k in 1usize..1_000_000, c in 0.0f64..1e14) {
            prop_assert!(gamma(k + 1, c) <= gamma(k, c));
            prop_assert!(gamma(k, c) >= 1.0);
        }

        #[test]
        fn metrics_stay_in_band(
            k in 1usize..10_000,
            c in 0.0f64..1e4,
            grads in proptest::collection::vec(-1e3f64..1e3, 1..8),
        ) {
            let n = grads.len();
            let g = gamma(k, c);
            let mut s = MetricSchedule::new(MetricStrategy::Adagrad { epsilon: 1e-6, clamp_numerator: c }, n);
            let d = s.adagrad_metric(k, &grads).unwrap();
            for &di in d.diag() {
                prop_assert!(di >= 1.0 / g - 1e-15 && di <= g + 1e-15);
            }
            let y: Vec<f64> = grads.iter().map(|x| x.abs()).collect();
            let v: Vec<f64> = grads.iter().map(|x| 0.5 + x.abs() * 0.1).collect();
            let d = split_gradient_metric(k, &y, &v, c).unwrap();
            for &di in d.diag() {
                prop_assert!(di >= 1.0 / g * (1.0 - 1e-12) && di <= g * (1.0 + 1e-12));
            }
        }
    }
}
