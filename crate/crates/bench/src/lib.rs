//! Fixed, seeded instances shared by the benchmarks.

use vmdca::data::{gen_logreg, gen_poisson_cs, LogRegParams, PoissonCsParams, RngSpec};
use vmdca::problems::{LogRegData, PoissonCsData};

pub fn logistic_instance(m: usize, n: usize, seed: u64) -> LogRegData {
    let params = LogRegParams {
        m,
        n,
        ..LogRegParams::default()
    };
    gen_logreg(&params, &mut RngSpec::new(seed).rng())
        .expect("valid parameters")
        .0
}

pub fn poisson_instance(n: usize, m: usize, k_nonzeros: usize, seed: u64) -> PoissonCsData {
    let params = PoissonCsParams {
        n,
        m,
        k_nonzeros,
        ..PoissonCsParams::default()
    };
    gen_poisson_cs(&params, &mut RngSpec::new(seed).rng())
        .expect("valid parameters")
        .0
}
