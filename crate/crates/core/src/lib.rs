//! Accelerated, variable-metric proximal DC algorithms with backtracking.
//!
//! Problems have the form `min_{x ∈ Y} F(x) = f(x) + g(x) − h(x)` with `f`
//! smooth convex, `g` proximable convex, and `h` convex. The main entry
//! points are [`spdcae_run`], [`sfista_run`] (for `h ≡ 0`), and the fixed-step
//! baselines [`pdcae_run`] and [`adca_run`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod accel;
pub mod data;
pub mod error;
pub mod linalg;
pub mod linesearch;
pub mod metric;
pub mod model;
pub mod problems;
pub mod solver;

pub use accel::{BetaFamily, BetaSchedule, Extrapolation, ThetaMode};
pub use error::{Error, Result};
pub use linalg::{DenseMatrix, Matrix, SparseMatrix};
pub use linesearch::{BacktrackConfig, BacktrackMode, DeflateRule};
pub use metric::{DiagonalMetric, MetricStrategy};
pub use model::{
    ConcavePartOracle, DcProblem, FeasibleSet, LeastSquares, ProximableOracle, ScaledL2Norm,
    SeparableQuadratic, SetIndicator, SmoothOracle, Zero,
};
pub use solver::presets::{Application, Preset};
pub use solver::{
    adca_run, pdcae_run, relative_error, run_method, sfista_run, spdcae_run, Method, SolveResult,
    SolverConfig, StopReason, StoppingRule, TraceRecord,
};
