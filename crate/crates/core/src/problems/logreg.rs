//! Sparse binary logistic regression with the ℓ1−2 penalty:
//!
//! `min (1/m) Σ log(1 + exp(−bᵢ aᵢᵀx)) + λ‖x‖₁ − λ‖x‖₂`.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{max_eig_gram, norm1, norm2, Matrix};
use crate::metric::DiagonalMetric;
use crate::model::{DcProblem, FeasibleSet, ProximableOracle, ScaledL2Norm, SmoothOracle};

/// `log(1 + e^z)` without overflow.
pub fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

/// `1 / (1 + e^{−z})`
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Design matrix, ±1 labels, and the penalty weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRegData {
    pub a: Matrix,
    pub b: Vec<f64>,
    pub lambda: f64,
}

impl LogRegData {
    pub fn new(a: Matrix, b: Vec<f64>, lambda: f64) -> Result<Self> {
        check_dim(a.rows(), b.len())?;
        if let Some(bad) = b.iter().find(|&&l| l != 1.0 && l != -1.0) {
            return Err(Error::InvalidParameter(format!(
                "labels must be ±1, found {bad}"
            )));
        }
        if !(lambda >= 0.0) {
            return Err(Error::InvalidParameter("lambda must be nonnegative".into()));
        }
        Ok(Self { a, b, lambda })
    }

    pub fn loss(&self) -> LogisticLoss {
        LogisticLoss {
            a: self.a.clone(),
            b: self.b.clone(),
        }
    }

    /// `f` = mean logistic loss, `g = λ‖·‖₁`, `h = λ‖·‖₂`, `Y = ℝⁿ`.
    pub fn to_problem(&self) -> DcProblem {
        let mut p = DcProblem::new(
            self.loss(),
            L1Norm {
                lambda: self.lambda,
            },
            ScaledL2Norm {
                lambda: self.lambda,
            },
            FeasibleSet::WholeSpace,
        );
        p.lower_bound_hint = Some(0.0);
        p
    }

    /// Same loss with `h ≡ 0`: the convex ℓ1-regularized problem.
    pub fn to_convex_problem(&self) -> DcProblem {
        DcProblem::new(
            self.loss(),
            L1Norm {
                lambda: self.lambda,
            },
            crate::model::Zero,
            FeasibleSet::WholeSpace,
        )
    }
}

/// Mean logistic loss `(1/m) Σ softplus(−bᵢ aᵢᵀx)`.
#[derive(Debug, Clone)]
pub struct LogisticLoss {
    a: Matrix,
    b: Vec<f64>,
}

impl LogisticLoss {
    pub fn new(a: Matrix, b: Vec<f64>) -> Result<Self> {
        check_dim(a.rows(), b.len())?;
        Ok(Self { a, b })
    }
}

/// `(1/m) Σ log(1 + exp(−bᵢ aᵢᵀx))` and its gradient `−(1/m) Aᵀ(b ⊙ σ(−b ⊙ Ax))`.
pub fn logistic_value_grad(data: &LogRegData, x: &[f64]) -> (f64, Vec<f64>) {
    value_grad(&data.a, &data.b, x)
}

fn value_grad(a: &Matrix, b: &[f64], x: &[f64]) -> (f64, Vec<f64>) {
    let m = b.len();
    if m == 0 {
        return (0.0, vec![0.0; x.len()]);
    }
    let inv_m = 1.0 / m as f64;
    let ax = a.mul_vec(x);
    let mut value = 0.0;
    let weights: Vec<f64> = ax
        .iter()
        .zip(b)
        .map(|(&z, &bi)| {
            let margin = -bi * z;
            value += softplus(margin);
            -bi * sigmoid(margin) * inv_m
        })
        .collect();
    (value * inv_m, a.mul_vec_t(&weights))
}

impl SmoothOracle for LogisticLoss {
    fn dim(&self) -> usize {
        self.a.cols()
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        let m = self.b.len();
        if m == 0 {
            return Ok(0.0);
        }
        let ax = self.a.mul_vec(x);
        Ok(ax
            .iter()
            .zip(&self.b)
            .map(|(z, bi)| softplus(-bi * z))
            .sum::<f64>()
            / m as f64)
    }

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.value_and_gradient(x)?.1)
    }

    fn value_and_gradient(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        check_dim(self.dim(), x.len())?;
        Ok(value_grad(&self.a, &self.b, x))
    }

    fn lipschitz_hint(&self) -> Option<f64> {
        Some(lipschitz_of(&self.a).value)
    }
}

/// `g(x) = λ‖x‖₁` with the per-coordinate soft-threshold prox.
#[derive(Debug, Clone, Copy)]
pub struct L1Norm {
    pub lambda: f64,
}

impl ProximableOracle for L1Norm {
    fn value(&self, x: &[f64]) -> f64 {
        self.lambda * norm1(x)
    }

    fn scaled_prox(&self, v: &[f64], t: f64, metric: &DiagonalMetric) -> Vec<f64> {
        l1_scaled_prox(v, t, self.lambda, metric)
    }
}

/// `uᵢ = sign(vᵢ) max(|vᵢ| − tλ/Dᵢ, 0)`.
pub fn l1_scaled_prox(v: &[f64], t: f64, lambda: f64, metric: &DiagonalMetric) -> Vec<f64> {
    v.iter()
        .zip(metric.diag())
        .map(|(&vi, &di)| {
            let level = t * lambda / di;
            vi.signum() * (vi.abs() - level).max(0.0)
        })
        .collect()
}

/// `λ x / ‖x‖₂`, or `0` at the origin.
pub fn l2_subgradient(x: &[f64], lambda: f64) -> Vec<f64> {
    let n = norm2(x);
    if n == 0.0 {
        return vec![0.0; x.len()];
    }
    x.iter().map(|xi| lambda * xi / n).collect()
}

/// Global Lipschitz bound of the mean logistic loss gradient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzBound {
    pub value: f64,
    /// `true` when power iteration stalled and `‖A‖²_F / (4m)` was returned instead.
    pub frobenius_fallback: bool,
}

/// `λ_max(AᵀA) / (4m)`; valid since `σ' ≤ 1/4`.
pub fn logistic_lipschitz_bound(data: &LogRegData) -> LipschitzBound {
    lipschitz_of(&data.a)
}

fn lipschitz_of(a: &Matrix) -> LipschitzBound {
    let m = a.rows().max(1) as f64;
    let est = max_eig_gram(a, 1e-8, 1000);
    if est.converged {
        LipschitzBound {
            value: est.value / (4.0 * m),
            frobenius_fallback: false,
        }
    } else {
        log::warn!("power iteration did not converge; using the Frobenius bound");
        LipschitzBound {
            value: a.frobenius_sq() / (4.0 * m),
            frobenius_fallback: true,
        }
    }
}
