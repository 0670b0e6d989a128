#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use vmdca::data::RngSpec;
use vmdca::problems::L1Norm;
use vmdca::problems::NonnegL1;
use vmdca::{DcProblem, DenseMatrix, FeasibleSet, LeastSquares, Matrix, SetIndicator, Zero};

pub fn rng(seed: u64) -> ChaCha20Rng {
    RngSpec::new(seed).rng()
}

pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha20Rng) -> Matrix {
    let data = (0..rows * cols)
        .map(|_| rng.sample(StandardNormal))
        .collect();
    Matrix::Dense(DenseMatrix::new(rows, cols, data).unwrap())
}

pub fn gaussian_vec(n: usize, rng: &mut ChaCha20Rng) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

pub fn uniform_vec(n: usize, rng: &mut ChaCha20Rng) -> Vec<f64> {
    (0..n).map(|_| rng.random::<f64>()).collect()
}

/// `½‖Ax − b‖² + λ‖x‖₁`
pub fn lasso(m: usize, n: usize, lambda: f64, seed: u64) -> DcProblem {
    let mut r = rng(seed);
    let a = gaussian_matrix(m, n, &mut r);
    let b = gaussian_vec(m, &mut r);
    DcProblem::new(
        LeastSquares::new(a, b).unwrap(),
        L1Norm { lambda },
        Zero,
        FeasibleSet::WholeSpace,
    )
}

/// `½‖Ax − b‖²` over `x ≥ 0`.
pub fn nnls(m: usize, n: usize, seed: u64) -> DcProblem {
    let mut r = rng(seed);
    let a = gaussian_matrix(m, n, &mut r);
    let b = gaussian_vec(m, &mut r);
    DcProblem::new(
        LeastSquares::new(a, b).unwrap(),
        SetIndicator(FeasibleSet::NonnegativeOrthant),
        Zero,
        FeasibleSet::NonnegativeOrthant,
    )
}

/// `½(x − 3)² + |x|`, minimized at `x* = 2` with value `2.5`.
pub fn lasso_1d() -> DcProblem {
    DcProblem::new(
        vmdca::SeparableQuadratic::new(vec![1.0], vec![3.0]).unwrap(),
        L1Norm { lambda: 1.0 },
        Zero,
        FeasibleSet::WholeSpace,
    )
}

pub fn nonneg_l1(lambda: f64) -> NonnegL1 {
    NonnegL1 { lambda }
}

/// Minimizes a unimodal scalar function on `[lo, hi]` by golden-section search.
pub fn golden_section(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> f64 {
    golden_section_by(|a, b| f(a) < f(b), lo, hi, tol)
}

/// Golden-section search driven by a comparison `less(a, b) ⇔ φ(a) < φ(b)`,
/// so callers can compare objective differences without cancellation.
pub fn golden_section_by(
    less: impl Fn(f64, f64) -> bool,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    while hi - lo > tol {
        if less(c, d) {
            hi = d;
            d = c;
            c = hi - inv_phi * (hi - lo);
        } else {
            lo = c;
            c = d;
            d = lo + inv_phi * (hi - lo);
        }
    }
    0.5 * (lo + hi)
}

/// Largest relative discrepancy between `∇f` and central differences with step
/// `1e−6·max(1, |x_j|)`.
pub fn gradient_fd_error(f: &dyn vmdca::SmoothOracle, x: &[f64]) -> f64 {
    let g = f.gradient(x).unwrap();
    let mut fd = vec![0.0; x.len()];
    let mut xp = x.to_vec();
    for j in 0..x.len() {
        let h = 1e-6 * x[j].abs().max(1.0);
        xp[j] = x[j] + h;
        let up = f.value(&xp).unwrap();
        xp[j] = x[j] - h;
        let down = f.value(&xp).unwrap();
        xp[j] = x[j];
        fd[j] = (up - down) / (2.0 * h);
    }
    let diff: f64 = g
        .iter()
        .zip(&fd)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt();
    let scale = g.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
    diff / scale
}
