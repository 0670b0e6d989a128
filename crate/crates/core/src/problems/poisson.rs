//! Compressed sensing under Poisson noise: generalized Kullback–Leibler data term,
//! `λ‖x‖₁ + δ_{ℝ₊ⁿ}` regularizer, and `λ‖x‖₂` subtracted.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::Matrix;
use crate::metric::DiagonalMetric;
use crate::model::{DcProblem, FeasibleSet, ProximableOracle, ScaledL2Norm, SmoothOracle};

/// Nonnegative measurement matrix, observed counts, background, and penalty weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoissonCsData {
    pub a: Matrix,
    pub b: Vec<f64>,
    pub bg: f64,
    pub lambda: f64,
}

impl PoissonCsData {
    pub fn new(a: Matrix, b: Vec<f64>, bg: f64, lambda: f64) -> Result<Self> {
        check_dim(a.rows(), b.len())?;
        if a.min_entry() < 0.0 {
            return Err(Error::InvalidParameter(
                "measurement matrix must be nonnegative".into(),
            ));
        }
        if b.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::InvalidParameter(
                "observations must be nonnegative".into(),
            ));
        }
        if !(bg > 0.0) {
            return Err(Error::InvalidParameter(
                "background must be positive".into(),
            ));
        }
        Ok(Self { a, b, bg, lambda })
    }

    pub fn loss(&self) -> KlDivergence {
        KlDivergence {
            a: self.a.clone(),
            b: self.b.clone(),
            bg: self.bg,
            column_sums: self.a.column_sums(),
        }
    }

    /// `f = KL`, `g = λ‖·‖₁ + δ_{ℝ₊}`, `h = λ‖·‖₂`, `Y = ℝ₊ⁿ`.
    pub fn to_problem(&self) -> DcProblem {
        let mut p = DcProblem::new(
            self.loss(),
            NonnegL1 {
                lambda: self.lambda,
            },
            ScaledL2Norm {
                lambda: self.lambda,
            },
            FeasibleSet::NonnegativeOrthant,
        );
        p.lower_bound_hint = Some(0.0);
        p
    }
}

/// Generalized KL divergence `Σ bᵢ log(bᵢ/cᵢ) + cᵢ − bᵢ`, `c = Ax + bg`.
#[derive(Debug, Clone)]
pub struct KlDivergence {
    a: Matrix,
    b: Vec<f64>,
    bg: f64,
    column_sums: Vec<f64>,
}

impl KlDivergence {
    fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.a.cols(), x.len())?;
        let mut c = self.a.mul_vec(x);
        for (i, ci) in c.iter_mut().enumerate() {
            *ci += self.bg;
            if !(*ci > 0.0) {
                return Err(Error::Domain {
                    oracle: "kl",
                    detail: format!("(Ax + bg)[{i}] = {ci} is not positive"),
                });
            }
        }
        Ok(c)
    }

    fn value_from(&self, c: &[f64]) -> f64 {
        c.iter()
            .zip(&self.b)
            .map(|(&ci, &bi)| {
                if bi == 0.0 {
                    ci
                } else {
                    bi * (bi / ci).ln() + ci - bi
                }
            })
            .sum()
    }

    /// `(U, V)` with `U = Aᵀ(b / c)`, `V = Aᵀ1`.
    pub fn split(&self, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let c = self.forward(x)?;
        self.check_columns()?;
        let ratio: Vec<f64> = self.b.iter().zip(&c).map(|(b, c)| b / c).collect();
        Ok((self.a.mul_vec_t(&ratio), self.column_sums.clone()))
    }

    fn check_columns(&self) -> Result<()> {
        if let Some(j) = self.column_sums.iter().position(|s| !(*s > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "column {j} of the measurement matrix is zero; split denominator vanishes"
            )));
        }
        Ok(())
    }
}

impl SmoothOracle for KlDivergence {
    fn dim(&self) -> usize {
        self.a.cols()
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        Ok(self.value_from(&self.forward(x)?))
    }

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.value_and_gradient(x)?.1)
    }

    fn value_and_gradient(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        let c = self.forward(x)?;
        let w: Vec<f64> = self.b.iter().zip(&c).map(|(b, c)| 1.0 - b / c).collect();
        Ok((self.value_from(&c), self.a.mul_vec_t(&w)))
    }

    fn split_denominator(&self, _x: &[f64]) -> Option<Result<Vec<f64>>> {
        Some(self.check_columns().map(|_| self.column_sums.clone()))
    }
}

/// KL value and gradient `Aᵀ(1 − b/(Ax+bg))`.
pub fn kl_value_grad(data: &PoissonCsData, x: &[f64]) -> Result<(f64, Vec<f64>)> {
    data.loss().value_and_gradient(x)
}

/// `−∇KL = U − V` with `U = Aᵀ(b/(Ax+bg)) ≥ 0`, `V = Aᵀ1 > 0`.
pub fn kl_split(data: &PoissonCsData, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    data.loss().split(x)
}

/// `g(x) = λ‖x‖₁ + δ_{ℝ₊ⁿ}(x)`.
#[derive(Debug, Clone, Copy)]
pub struct NonnegL1 {
    pub lambda: f64,
}

impl ProximableOracle for NonnegL1 {
    fn value(&self, x: &[f64]) -> f64 {
        if x.iter().any(|&v| v < 0.0) {
            return f64::INFINITY;
        }
        self.lambda * x.iter().sum::<f64>()
    }

    fn scaled_prox(&self, v: &[f64], t: f64, metric: &DiagonalMetric) -> Vec<f64> {
        l1_nonneg_scaled_prox(v, t, self.lambda, metric)
    }
}

/// `uᵢ = max(vᵢ − tλ/Dᵢ, 0)`.
pub fn l1_nonneg_scaled_prox(v: &[f64], t: f64, lambda: f64, metric: &DiagonalMetric) -> Vec<f64> {
    v.iter()
        .zip(metric.diag())
        .map(|(&vi, &di)| (vi - t * lambda / di).max(0.0))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseMatrix;

    fn scalar(b: f64, bg: f64) -> PoissonCsData {
        PoissonCsData::new(
            DenseMatrix::from_rows(&[vec![1.0]]).unwrap().into(),
            vec![b],
            bg,
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn scalar_value_and_gradient() {
        let d = scalar(2.0, 0.5);
        let (v, g) = kl_value_grad(&d, &[0.5]).unwrap();
        assert!((v - (2.0 * 2f64.ln() - 1.0)).abs() < 1e-15);
        assert!((v - 0.3863).abs() < 1e-4);
        assert!((g[0] + 1.0).abs() < 1e-15);
        let (u, vv) = kl_split(&d, &[0.5]).unwrap();
        assert_eq!(u, vec![2.0]);
        assert_eq!(vv, vec![1.0]);
        assert_eq!(u[0] - vv[0], -g[0]);
    }

    #[test]
    fn matching_data_gives_zero() {
        let a = DenseMatrix::from_rows(&[vec![0.5, 0.5], vec![0.25, 0.0]]).unwrap();
        let x = [2.0, 4.0];
        let bg = 0.1;
        let b = vec![3.0 + bg, 0.5 + bg];
        let d = PoissonCsData::new(a.into(), b, bg, 0.0).unwrap();
        let (v, g) = kl_value_grad(&d, &x).unwrap();
        assert!(v.abs() < 1e-14);
        assert!(g.iter().all(|gi| gi.abs() < 1e-14));
    }

    #[test]
    fn zero_counts() {
        let a = DenseMatrix::from_rows(&[vec![0.5, 0.5], vec![0.25, 1.0]]).unwrap();
        let d = PoissonCsData::new(a.into(), vec![0.0, 0.0], 0.1, 0.0).unwrap();
        let x = [1.0, 2.0];
        let (v, g) = kl_value_grad(&d, &x).unwrap();
        assert!((v - (1.5 + 0.1 + 2.25 + 0.1)).abs() < 1e-14);
        assert_eq!(g, vec![0.75, 1.5]);
        let (u, vv) = kl_split(&d, &x).unwrap();
        assert_eq!(u, vec![0.0, 0.0]);
        assert_eq!(vv, vec![0.75, 1.5]);
    }

    #[test]
    fn domain_violation_is_an_error() {
        let d = scalar(1.0, 0.5);
        assert!(matches!(d.loss().value(&[-1.0]), Err(Error::Domain { .. })));
    }

    #[test]
    fn zero_column_breaks_split() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 0.0]]).unwrap();
        let d = PoissonCsData::new(a.into(), vec![1.0], 0.1, 0.0).unwrap();
        assert!(kl_split(&d, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn rejects_invalid_data() {
        let neg = DenseMatrix::from_rows(&[vec![-1.0]]).unwrap();
        assert!(PoissonCsData::new(neg.into(), vec![1.0], 0.1, 0.0).is_err());
        let a = DenseMatrix::from_rows(&[vec![1.0]]).unwrap();
        assert!(PoissonCsData::new(a.clone().into(), vec![1.0], 0.0, 0.0).is_err());
        assert!(PoissonCsData::new(a.into(), vec![-1.0], 0.1, 0.0).is_err());
    }

    #[test]
    fn nonneg_prox_examples() {
        let id = DiagonalMetric::identity(3);
        assert_eq!(
            l1_nonneg_scaled_prox(&[-1.0, 0.0, -3.0], 2.0, 1.0, &id),
            vec![0.0; 3]
        );
        assert_eq!(
            l1_nonneg_scaled_prox(&[2.0, -0.5, 0.3], 1.0, 1.0, &id),
            vec![1.0, 0.0, 0.0]
        );
        let d = DiagonalMetric::new(vec![3.0, 0.2, 9.0]).unwrap();
        assert_eq!(
            l1_nonneg_scaled_prox(&[2.0, -0.5, 0.3], 1.0, 0.0, &d),
            vec![2.0, 0.0, 0.3]
        );
    }
}
