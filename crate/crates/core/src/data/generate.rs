use rand::seq::index::sample;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, Matrix};
use crate::problems::{LogRegData, PoissonCsData};

use super::sampling::poisson_sample;

/// Synthetic Poisson compressed-sensing instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PoissonCsParams {
    pub n: usize,
    pub m: usize,
    pub k_nonzeros: usize,
    pub amp_max: f64,
    /// Bernoulli probability of a raw nonzero.
    pub p: f64,
    pub bg: f64,
    pub lambda: f64,
}

impl Default for PoissonCsParams {
    fn default() -> Self {
        Self {
            n: 5000,
            m: 1000,
            k_nonzeros: 20,
            amp_max: 1e5,
            p: 0.9,
            bg: 1e-10,
            lambda: 1e-3,
        }
    }
}

/// Column-normalized Bernoulli measurements, a sparse uniform signal, and Poisson counts.
///
/// Each column is divided by its count of nonzeros, so `A ≥ 0` and every
/// column sums to one; a column with no Bernoulli hit gets a single 1 in a
/// random row. Hence `(Az)_i ≤ Σ_j z_j` for all `z ≥ 0`.
pub fn gen_poisson_cs<R: Rng + ?Sized>(
    params: &PoissonCsParams,
    rng: &mut R,
) -> Result<(PoissonCsData, Vec<f64>)> {
    let PoissonCsParams {
        n,
        m,
        k_nonzeros,
        amp_max,
        p,
        bg,
        lambda,
    } = *params;
    if m == 0 || n == 0 {
        return Err(Error::InvalidParameter(
            "dimensions must be positive".into(),
        ));
    }
    if k_nonzeros > n {
        return Err(Error::InvalidParameter(format!(
            "{k_nonzeros} nonzeros do not fit in dimension {n}"
        )));
    }
    if !(0.0..=1.0).contains(&p) || !(amp_max >= 0.0 && amp_max.is_finite()) {
        return Err(Error::InvalidParameter(
            "need p in [0, 1] and finite amp_max ≥ 0".into(),
        ));
    }
    let mut a = DenseMatrix::zeros(m, n);
    for j in 0..n {
        let hits: Vec<usize> = (0..m).filter(|_| rng.random::<f64>() < p).collect();
        if hits.is_empty() {
            a.set(rng.random_range(0..m), j, 1.0);
        } else {
            let w = 1.0 / hits.len() as f64;
            for i in hits {
                a.set(i, j, w);
            }
        }
    }
    let mut x_true = vec![0.0; n];
    for j in sample(rng, n, k_nonzeros) {
        x_true[j] = amp_max * rng.random::<f64>();
    }
    let a = Matrix::Dense(a);
    let b = sample_counts(&a, &x_true, bg, rng);
    Ok((PoissonCsData::new(a, b, bg, lambda)?, x_true))
}

/// Componentwise Poisson draws with mean `(A x + bg)_i`.
pub fn sample_counts<R: Rng + ?Sized>(a: &Matrix, x: &[f64], bg: f64, rng: &mut R) -> Vec<f64> {
    a.mul_vec(x)
        .into_iter()
        .map(|mean| poisson_sample(mean + bg, rng) as f64)
        .collect()
}

/// Synthetic sparse logistic-regression instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LogRegParams {
    pub m: usize,
    pub n: usize,
    /// Fraction of nonzero ground-truth weights.
    pub sparsity_of_truth: f64,
    /// Probability of flipping each label.
    pub noise_rate: f64,
    pub lambda: f64,
    /// Feature `j` has standard deviation `feature_scale_ratio^(−j/(n−1))`.
    pub feature_scale_ratio: f64,
}

impl Default for LogRegParams {
    fn default() -> Self {
        Self {
            m: 2000,
            n: 300,
            sparsity_of_truth: 0.1,
            noise_rate: 0.05,
            lambda: 1e-3,
            feature_scale_ratio: 1.0,
        }
    }
}

/// Gaussian features and labels `sign(a_iᵀw*)`, each flipped with probability `noise_rate`.
pub fn gen_logreg<R: Rng + ?Sized>(
    params: &LogRegParams,
    rng: &mut R,
) -> Result<(LogRegData, Vec<f64>)> {
    let LogRegParams {
        m,
        n,
        sparsity_of_truth,
        noise_rate,
        lambda,
        feature_scale_ratio,
    } = *params;
    if m == 0 || n == 0 {
        return Err(Error::InvalidParameter(
            "dimensions must be positive".into(),
        ));
    }
    if !(0.0..=1.0).contains(&sparsity_of_truth) || !(0.0..=1.0).contains(&noise_rate) {
        return Err(Error::InvalidParameter("rates must lie in [0, 1]".into()));
    }
    if !(feature_scale_ratio >= 1.0 && feature_scale_ratio.is_finite()) {
        return Err(Error::InvalidParameter(
            "feature_scale_ratio must be ≥ 1".into(),
        ));
    }
    let k = ((sparsity_of_truth * n as f64).round() as usize).clamp(1, n);
    let mut w = vec![0.0; n];
    for j in sample(rng, n, k) {
        w[j] = rng.sample(StandardNormal);
    }
    let scales: Vec<f64> = (0..n)
        .map(|j| {
            let frac = if n > 1 {
                j as f64 / (n - 1) as f64
            } else {
                0.0
            };
            feature_scale_ratio.powf(-frac)
        })
        .collect();
    let mut a = DenseMatrix::zeros(m, n);
    let mut labels = Vec::with_capacity(m);
    for i in 0..m {
        for (j, s) in scales.iter().enumerate() {
            a.set(i, j, s * rng.sample::<f64, _>(StandardNormal));
        }
        let z: f64 = a.row(i).iter().zip(&w).map(|(x, y)| x * y).sum();
        let label = if z >= 0.0 { 1.0 } else { -1.0 };
        labels.push(if rng.random::<f64>() < noise_rate {
            -label
        } else {
            label
        });
    }
    Ok((LogRegData::new(Matrix::Dense(a), labels, lambda)?, w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::RngSpec;

    #[test]
    fn poisson_instance_is_valid() {
        let params = PoissonCsParams {
            n: 50,
            m: 10,
            k_nonzeros: 5,
            ..Default::default()
        };
        let (d, x) = gen_poisson_cs(&params, &mut RngSpec::new(1).rng()).unwrap();
        assert_eq!(x.iter().filter(|v| **v > 0.0).count(), 5);
        assert!(x.iter().all(|v| (0.0..=1e5).contains(v)));
        for s in d.a.column_sums() {
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_probability_uses_fallback() {
        let params = PoissonCsParams {
            n: 30,
            m: 4,
            k_nonzeros: 3,
            p: 0.0,
            ..Default::default()
        };
        let (d, _) = gen_poisson_cs(&params, &mut RngSpec::new(2).rng()).unwrap();
        let dense = d.a.to_dense();
        for j in 0..30 {
            let col: Vec<f64> = (0..4).map(|i| dense.get(i, j)).collect();
            assert_eq!(col.iter().filter(|v| **v == 1.0).count(), 1);
            assert_eq!(col.iter().filter(|v| **v == 0.0).count(), 3);
        }
    }

    #[test]
    fn degenerate_parameters_are_rejected() {
        let mut rng = RngSpec::new(0).rng();
        for params in [
            PoissonCsParams {
                m: 0,
                ..Default::default()
            },
            PoissonCsParams {
                n: 3,
                k_nonzeros: 4,
                ..Default::default()
            },
            PoissonCsParams {
                p: 1.5,
                ..Default::default()
            },
        ] {
            assert!(gen_poisson_cs(&params, &mut rng).is_err());
        }
        assert!(gen_logreg(
            &LogRegParams {
                n: 0,
                ..Default::default()
            },
            &mut rng
        )
        .is_err());
    }

    #[test]
    fn noiseless_labels_are_separable() {
        let params = LogRegParams {
            m: 200,
            n: 10,
            noise_rate: 0.0,
            ..Default::default()
        };
        let (d, w) = gen_logreg(&params, &mut RngSpec::new(3).rng()).unwrap();
        let z = d.a.mul_vec(&w);
        assert!(z.iter().zip(&d.b).all(|(z, b)| z * b >= 0.0));
    }

    #[test]
    fn single_row_and_determinism() {
        let params = LogRegParams {
            m: 1,
            n: 4,
            ..Default::default()
        };
        let (d1, w1) = gen_logreg(&params, &mut RngSpec::new(9).rng()).unwrap();
        let (d2, w2) = gen_logreg(&params, &mut RngSpec::new(9).rng()).unwrap();
        assert_eq!(d1.a.rows(), 1);
        assert_eq!(
            serde_json::to_string(&d1).unwrap(),
            serde_json::to_string(&d2).unwrap()
        );
        assert_eq!(w1, w2);
    }
}
