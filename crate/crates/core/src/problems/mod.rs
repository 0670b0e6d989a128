//! Concrete problem instances.

pub mod logreg;
pub mod poisson;

pub use logreg::{L1Norm, LogRegData, LogisticLoss};
pub use poisson::{KlDivergence, NonnegL1, PoissonCsData};
