//! Oracle interfaces for composite DC programs `F(x) = f(x) + g(x) − h(x)`.
//!
//! * `f` is smooth and convex on the interior of its domain ([`SmoothOracle`]),
//! * `g` is convex with a cheap scaled proximal map ([`ProximableOracle`]),
//! * `h` is convex and continuous ([`ConcavePartOracle`]); it enters `F` with a minus sign.
//!
//! The feasible set `Y` satisfies `dom g ⊆ Y ⊆ int dom f`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{dot, Matrix};
use crate::metric::DiagonalMetric;

/// Smooth convex part `f`.
pub trait SmoothOracle: Send + Sync {
    fn dim(&self) -> usize;

    /// `f(x)`. Points outside `int dom f` yield [`Error::Domain`].
    fn value(&self, x: &[f64]) -> Result<f64>;

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>>;

    fn value_and_gradient(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        Ok((self.value(x)?, self.gradient(x)?))
    }

    /// `V(x)` of a split `−∇f(x) = U(x) − V(x)` with `U ≥ 0`, `V > 0`, when one is known.
    fn split_denominator(&self, _x: &[f64]) -> Option<Result<Vec<f64>>> {
        None
    }

    /// A global Lipschitz constant of `∇f`, when cheaply available.
    fn lipschitz_hint(&self) -> Option<f64> {
        None
    }
}

/// Convex, proximable part `g`.
pub trait ProximableOracle: Send + Sync {
    /// `g(x)`, `+∞` outside `dom g`.
    fn value(&self, x: &[f64]) -> f64;

    /// `argmin_u g(u) + (1/(2t)) ‖u − v‖²_D`.
    fn scaled_prox(&self, v: &[f64], t: f64, metric: &DiagonalMetric) -> Vec<f64>;
}

/// Convex part `h` that is subtracted.
pub trait ConcavePartOracle: Send + Sync {
    fn value(&self, x: &[f64]) -> f64;

    /// Some element of `∂h(x)`.
    fn subgradient(&self, x: &[f64]) -> Vec<f64>;

    /// `true` when `h ≡ 0`; lets solvers skip the subgradient entirely.
    fn is_zero(&self) -> bool {
        false
    }
}

/// Closed convex set `Y` with a scaled projection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FeasibleSet {
    WholeSpace,
    NonnegativeOrthant,
    Box { lower: Vec<f64>, upper: Vec<f64> },
}

impl FeasibleSet {
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            FeasibleSet::WholeSpace => true,
            FeasibleSet::NonnegativeOrthant => x.iter().all(|&v| v >= 0.0),
            FeasibleSet::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .all(|(v, (l, u))| *l <= *v && *v <= *u),
        }
    }

    /// `argmin_{u ∈ Y} ‖u − v‖²_D`.
    ///
    /// All supported sets are coordinate-separable, so the diagonal metric
    /// does not change the minimizer.
    pub fn scaled_project(&self, v: &[f64], _metric: &DiagonalMetric) -> Vec<f64> {
        self.project(v)
    }

    pub fn project(&self, v: &[f64]) -> Vec<f64> {
        match self {
            FeasibleSet::WholeSpace => v.to_vec(),
            FeasibleSet::NonnegativeOrthant => v.iter().map(|x| x.max(0.0)).collect(),
            FeasibleSet::Box { lower, upper } => v
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(x, (l, u))| x.clamp(*l, *u))
                .collect(),
        }
    }
}

/// A composite DC program together with its feasible set.
#[derive(Clone)]
pub struct DcProblem {
    pub f: Arc<dyn SmoothOracle>,
    pub g: Arc<dyn ProximableOracle>,
    pub h: Arc<dyn ConcavePartOracle>,
    pub set: FeasibleSet,
    pub lower_bound_hint: Option<f64>,
}

impl std::fmt::Debug for DcProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DcProblem")
            .field("dim", &self.f.dim())
            .field("set", &self.set)
            .field("lower_bound_hint", &self.lower_bound_hint)
            .finish_non_exhaustive()
    }
}

impl DcProblem {
    pub fn new(
        f: impl SmoothOracle + 'static,
        g: impl ProximableOracle + 'static,
        h: impl ConcavePartOracle + 'static,
        set: FeasibleSet,
    ) -> Self {
        Self {
            f: Arc::new(f),
            g: Arc::new(g),
            h: Arc::new(h),
            set,
            lower_bound_hint: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.f.dim()
    }

    /// `F(x)`; `+∞` outside `dom g`, an error outside `int dom f`.
    pub fn objective(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        let gx = self.g.value(x);
        if gx == f64::INFINITY {
            return Ok(f64::INFINITY);
        }
        Ok(self.f.value(x)? + gx - self.h.value(x))
    }

    /// `F(x)` when `f(x)` is already known.
    pub(crate) fn objective_with_f(&self, fx: f64, x: &[f64]) -> f64 {
        fx + self.g.value(x) - self.h.value(x)
    }

    /// `‖x − Prox_{t g}(x − t[∇f(x) − h'(x)])‖` in the Euclidean metric.
    ///
    /// Zero exactly when `x` is critical for the subgradient the `h` oracle returns.
    pub fn criticality_residual(&self, x: &[f64], t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "step t must be positive, got {t}"
            )));
        }
        check_dim(self.dim(), x.len())?;
        let grad = self.f.gradient(x)?;
        let hx = self.h.subgradient(x);
        let v: Vec<f64> = x
            .iter()
            .zip(grad.iter().zip(&hx))
            .map(|(xi, (gi, hi))| xi - t * (gi - hi))
            .collect();
        let p = self
            .g
            .scaled_prox(&v, t, &DiagonalMetric::identity(x.len()));
        Ok(crate::linalg::dist2(x, &p))
    }
}

/// Free-function form of [`DcProblem::objective`].
pub fn objective(p: &DcProblem, x: &[f64]) -> Result<f64> {
    p.objective(x)
}

/// Free-function form of [`DcProblem::criticality_residual`].
pub fn criticality_residual(p: &DcProblem, x: &[f64], t: f64) -> Result<f64> {
    p.criticality_residual(x, t)
}

// ---------------------------------------------------------------------------
// Generic oracles used by tests, benchmarks, and the convex instances.

/// `f(x) = ½ ‖A x − b‖²`.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    a: Matrix,
    b: Vec<f64>,
}

impl LeastSquares {
    pub fn new(a: Matrix, b: Vec<f64>) -> Result<Self> {
        check_dim(a.rows(), b.len())?;
        Ok(Self { a, b })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.a
    }

    fn residual(&self, x: &[f64]) -> Vec<f64> {
        let mut r = self.a.mul_vec(x);
        r.iter_mut().zip(&self.b).for_each(|(ri, bi)| *ri -= bi);
        r
    }
}

impl SmoothOracle for LeastSquares {
    fn dim(&self) -> usize {
        self.a.cols()
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        let r = self.residual(x);
        Ok(0.5 * dot(&r, &r))
    }

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.a.mul_vec_t(&self.residual(x)))
    }

    fn value_and_gradient(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        let r = self.residual(x);
        Ok((0.5 * dot(&r, &r), self.a.mul_vec_t(&r)))
    }

    fn lipschitz_hint(&self) -> Option<f64> {
        Some(crate::linalg::max_eig_gram(&self.a, 1e-12, 10_000).value)
    }
}

/// `f(x) = ½ Σ wᵢ (xᵢ − cᵢ)²` with `wᵢ ≥ 0`.
#[derive(Debug, Clone)]
pub struct SeparableQuadratic {
    weights: Vec<f64>,
    center: Vec<f64>,
}

impl SeparableQuadratic {
    pub fn new(weights: Vec<f64>, center: Vec<f64>) -> Result<Self> {
        check_dim(weights.len(), center.len())?;
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::InvalidParameter(
                "quadratic weights must be nonnegative".into(),
            ));
        }
        Ok(Self { weights, center })
    }

    /// `½ L ‖x‖²`
    pub fn isotropic(n: usize, l: f64) -> Self {
        Self {
            weights: vec![l; n],
            center: vec![0.0; n],
        }
    }
}

impl SmoothOracle for SeparableQuadratic {
    fn dim(&self) -> usize {
        self.weights.len()
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        Ok(0.5
            * x.iter()
                .zip(self.weights.iter().zip(&self.center))
                .map(|(xi, (w, c))| w * (xi - c) * (xi - c))
                .sum::<f64>())
    }

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(x.iter()
            .zip(self.weights.iter().zip(&self.center))
            .map(|(xi, (w, c))| w * (xi - c))
            .collect())
    }

    fn lipschitz_hint(&self) -> Option<f64> {
        Some(self.weights.iter().copied().fold(0.0, f64::max))
    }
}

/// `g ≡ 0` or `h ≡ 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Zero;

impl ProximableOracle for Zero {
    fn value(&self, _x: &[f64]) -> f64 {
        0.0
    }

    fn scaled_prox(&self, v: &[f64], _t: f64, _metric: &DiagonalMetric) -> Vec<f64> {
        v.to_vec()
    }
}

impl ConcavePartOracle for Zero {
    fn value(&self, _x: &[f64]) -> f64 {
        0.0
    }

    fn subgradient(&self, x: &[f64]) -> Vec<f64> {
        vec![0.0; x.len()]
    }

    fn is_zero(&self) -> bool {
        true
    }
}

/// Indicator of a feasible set, so `g = δ_Y` and the prox is the projection.
#[derive(Debug, Clone)]
pub struct SetIndicator(pub FeasibleSet);

impl ProximableOracle for SetIndicator {
    fn value(&self, x: &[f64]) -> f64 {
        if self.0.contains(x) {
            0.0
        } else {
            f64::INFINITY
        }
    }

    fn scaled_prox(&self, v: &[f64], _t: f64, metric: &DiagonalMetric) -> Vec<f64> {
        self.0.scaled_project(v, metric)
    }
}

/// `h(x) = λ ‖x‖₂`; the subgradient at the origin is chosen as `0`.
#[derive(Debug, Clone, Copy)]
pub struct ScaledL2Norm {
    pub lambda: f64,
}

impl ConcavePartOracle for ScaledL2Norm {
    fn value(&self, x: &[f64]) -> f64 {
        self.lambda * crate::linalg::norm2(x)
    }

    fn subgradient(&self, x: &[f64]) -> Vec<f64> {
        crate::problems::logreg::l2_subgradient(x, self.lambda)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::logreg::L1Norm;

    #[test]
    fn objective_sums_parts() {
        let p = DcProblem::new(
            SeparableQuadratic::isotropic(2, 1.0),
            L1Norm { lambda: 1.0 },
            Zero,
            FeasibleSet::WholeSpace,
        );
        assert_eq!(p.objective(&[1.0, -1.0]).unwrap(), 3.0);
    }

    #[test]
    fn objective_with_only_h() {
        let p = DcProblem::new(
            SeparableQuadratic::isotropic(2, 0.0),
            Zero,
            ScaledL2Norm { lambda: 1.0 },
            FeasibleSet::WholeSpace,
        );
        assert_eq!(p.objective(&[3.0, 4.0]).unwrap(), -5.0);
    }

    #[test]
    fn objective_is_infinite_outside_dom_g() {
        let p = DcProblem::new(
            SeparableQuadratic::isotropic(1, 1.0),
            SetIndicator(FeasibleSet::NonnegativeOrthant),
            Zero,
            FeasibleSet::NonnegativeOrthant,
        );
        assert_eq!(p.objective(&[-1.0]).unwrap(), f64::INFINITY);
        assert!(p.objective(&[1.0, 2.0]).is_err());
    }

    fn lasso_1d() -> DcProblem {
        DcProblem::new(
            SeparableQuadratic::new(vec![1.0], vec![2.0]).unwrap(),
            L1Norm { lambda: 1.0 },
            Zero,
            FeasibleSet::WholeSpace,
        )
    }

    #[test]
    fn residual_examples() {
        let p = DcProblem::new(
            SeparableQuadratic::isotropic(2, 1.0),
            Zero,
            Zero,
            FeasibleSet::WholeSpace,
        );
        assert_eq!(p.criticality_residual(&[0.0, 0.0], 1.0).unwrap(), 0.0);

        let p = lasso_1d();
        assert!(p.criticality_residual(&[1.0], 0.5).unwrap().abs() < 1e-15);
        assert!((p.criticality_residual(&[0.0], 0.5).unwrap() - 0.5).abs() < 1e-15);
        assert!(p.criticality_residual(&[0.0], 0.0).is_err());
    }

    #[test]
    fn projection_ignores_diagonal_metric() {
        let sets = [
            FeasibleSet::WholeSpace,
            FeasibleSet::NonnegativeOrthant,
            FeasibleSet::Box {
                lower: vec![-1.0, 0.0, 0.5],
                upper: vec![1.0, 2.0, 0.5],
            },
        ];
        let v = [-3.0, 1.5, 0.7];
        let d1 = DiagonalMetric::new(vec![0.1, 5.0, 2.0]).unwrap();
        let d2 = DiagonalMetric::new(vec![7.0, 0.3, 1e-3]).unwrap();
        for s in &sets {
            let p = s.scaled_project(&v, &d1);
            assert_eq!(p, s.scaled_project(&v, &d2));
            assert!(s.contains(&p));
        }
    }
}
