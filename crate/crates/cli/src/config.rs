use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};
use vmdca::data::{
    gen_logreg, gen_poisson_cs, read_libsvm, sample_counts, Instance, InstanceContainer,
    LogRegParams, PoissonCsParams, RngSpec,
};
use vmdca::problems::{L1Norm, LogRegData, PoissonCsData};
use vmdca::{
    Application, DcProblem, DenseMatrix, FeasibleSet, LeastSquares, Matrix, Method, Preset, Zero,
};

use crate::{CliError, Result};

/// Where the problem data comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProblemSpec {
    /// ℓ1−2 logistic regression. Seeds vary the random initial point.
    Logistic {
        #[serde(default)]
        generate: Option<LogRegParams>,
        #[serde(default)]
        libsvm: Option<PathBuf>,
        #[serde(default)]
        instance: Option<PathBuf>,
        /// Overrides the penalty of loaded data.
        #[serde(default)]
        lambda: Option<f64>,
        #[serde(default)]
        data_seed: u64,
    },
    /// Poisson compressed sensing started at the all-ones vector. Seeds vary the noise realization.
    PoissonCs {
        #[serde(default)]
        generate: Option<PoissonCsParams>,
        #[serde(default)]
        instance: Option<PathBuf>,
        #[serde(default)]
        data_seed: u64,
    },
    /// `½‖Ax − b‖² + λ‖x‖₁` with inline data. Seeds vary the random initial point.
    Lasso {
        a: Vec<Vec<f64>>,
        b: Vec<f64>,
        lambda: f64,
    },
}

/// One solver column: a preset name or a fully specified method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SolverSpec {
    Preset(String),
    Custom {
        name: String,
        #[serde(flatten)]
        method: Method,
    },
}

impl SolverSpec {
    pub fn name(&self) -> &str {
        match self {
            SolverSpec::Preset(name) => name,
            SolverSpec::Custom { name, .. } => name,
        }
    }

    pub fn method(&self, app: Application) -> Result<Method> {
        match self {
            SolverSpec::Preset(name) => Preset::from_name(name)
                .map(|p| p.method(app))
                .ok_or_else(|| CliError::Config(format!("unknown solver preset {name:?}"))),
            SolverSpec::Custom { method, .. } => Ok(method.clone()),
        }
    }
}

/// How the reference optimal value is obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReferenceSpec {
    pub solver: SolverSpec,
    pub iterations: usize,
    /// Known optimal value; skips the reference run.
    pub value: Option<f64>,
}

impl Default for ReferenceSpec {
    fn default() -> Self {
        Self {
            solver: SolverSpec::Preset("PDCAe1".into()),
            iterations: 10_000,
            value: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemSpec,
    pub solvers: Vec<SolverSpec>,
    /// Relative-error levels, loosest first; defaults depend on the problem kind.
    #[serde(default)]
    pub tolerances: Vec<f64>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub reference: ReferenceSpec,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    /// Worker threads for the run matrix; `None` uses all cores.
    #[serde(default)]
    pub threads: Option<usize>,
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

fn default_max_iter() -> usize {
    10_000
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let mut cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if cfg.tolerances.is_empty() {
            cfg.tolerances = cfg.default_tolerances();
        }
        Ok(cfg)
    }

    pub fn application(&self) -> Application {
        match self.problem {
            ProblemSpec::PoissonCs { .. } => Application::PoissonCs,
            ProblemSpec::Logistic { .. } | ProblemSpec::Lasso { .. } => Application::Logistic,
        }
    }

    fn default_tolerances(&self) -> Vec<f64> {
        match self.application() {
            Application::Logistic => vec![1e-2, 1e-4, 1e-6, 1e-8],
            Application::PoissonCs => vec![1e-1, 1e-2, 1e-3, 1e-4, 1e-5],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.solvers.is_empty() {
            return bad("at least one solver is required".into());
        }
        if self.seeds.is_empty() {
            return bad("at least one seed is required".into());
        }
        if self.tolerances.is_empty()
            || self.tolerances.iter().any(|t| !(*t > 0.0 && t.is_finite()))
        {
            return bad("tolerances must be positive".into());
        }
        if self.tolerances.windows(2).any(|w| w[1] >= w[0]) {
            return bad("tolerances must be strictly decreasing".into());
        }
        if self.threads == Some(0) {
            return bad("threads must be positive".into());
        }
        let app = self.application();
        for s in self
            .solvers
            .iter()
            .chain(std::iter::once(&self.reference.solver))
        {
            s.method(app)?;
        }
        let mut names: Vec<&str> = self.solvers.iter().map(|s| s.name()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return bad("solver names must be unique".into());
        }
        Ok(())
    }

    /// Loads or generates the shared data once.
    pub fn load_data(&self) -> Result<Dataset> {
        let cfg_err = |e: vmdca::Error| CliError::Config(e.to_string());
        match &self.problem {
            ProblemSpec::Logistic {
                generate,
                libsvm,
                instance,
                lambda,
                data_seed,
            } => {
                let mut data = match (generate, libsvm, instance) {
                    (Some(params), None, None) => {
                        gen_logreg(params, &mut RngSpec::new(*data_seed).rng())
                            .map_err(cfg_err)?
                            .0
                    }
                    (None, Some(path), None) => {
                        let d = read_libsvm(path, None).map_err(cfg_err)?;
                        LogRegData::new(Matrix::Sparse(d.matrix), d.labels, lambda.unwrap_or(1e-3))
                            .map_err(cfg_err)?
                    }
                    (None, None, Some(path)) => {
                        match InstanceContainer::load(path).map_err(cfg_err)?.payload {
                            Instance::Logistic { data, .. } => data,
                            _ => {
                                return Err(CliError::Config(
                                    "instance file is not a logistic problem".into(),
                                ))
                            }
                        }
                    }
                    _ => {
                        return Err(CliError::Config(
                            "logistic problems need exactly one of generate, libsvm, instance"
                                .into(),
                        ))
                    }
                };
                if let Some(l) = lambda {
                    data.lambda = *l;
                }
                Ok(Dataset::Logistic(Arc::new(data)))
            }
            ProblemSpec::PoissonCs {
                generate,
                instance,
                data_seed,
            } => {
                let (data, truth) = match (generate, instance) {
                    (Some(params), None) => {
                        gen_poisson_cs(params, &mut RngSpec::new(*data_seed).rng())
                            .map_err(cfg_err)?
                    }
                    (None, Some(path)) => {
                        match InstanceContainer::load(path).map_err(cfg_err)?.payload {
                            Instance::PoissonCs { data, truth } => {
                                let truth = truth.ok_or_else(|| {
                                    CliError::Config(
                                        "Poisson instance needs the ground truth to resample noise"
                                            .into(),
                                    )
                                })?;
                                (data, truth)
                            }
                            _ => {
                                return Err(CliError::Config(
                                    "instance file is not a Poisson problem".into(),
                                ))
                            }
                        }
                    }
                    _ => {
                        return Err(CliError::Config(
                            "Poisson problems need exactly one of generate, instance".into(),
                        ))
                    }
                };
                Ok(Dataset::PoissonCs {
                    data: Arc::new(data),
                    truth: Arc::new(truth),
                    noise: RngSpec::new(*data_seed),
                })
            }
            ProblemSpec::Lasso { a, b, lambda } => {
                let a = DenseMatrix::from_rows(a).map_err(cfg_err)?;
                let f = LeastSquares::new(Matrix::Dense(a), b.clone()).map_err(cfg_err)?;
                Ok(Dataset::Lasso(Arc::new(DcProblem::new(
                    f,
                    L1Norm { lambda: *lambda },
                    Zero,
                    FeasibleSet::WholeSpace,
                ))))
            }
        }
    }
}

/// Data shared by every cell of the run matrix.
#[derive(Debug, Clone)]
pub enum Dataset {
    Logistic(Arc<LogRegData>),
    PoissonCs {
        data: Arc<PoissonCsData>,
        truth: Arc<Vec<f64>>,
        noise: RngSpec,
    },
    Lasso(Arc<DcProblem>),
}

impl Dataset {
    /// Problem and starting point for one seed.
    pub fn instance(&self, seed: u64) -> Result<(Arc<DcProblem>, Vec<f64>)> {
        let uniform_start = |n: usize| {
            let mut rng = RngSpec::new(seed).rng();
            (0..n).map(|_| rng.random::<f64>()).collect::<Vec<f64>>()
        };
        match self {
            Dataset::Logistic(data) => {
                let p = data.to_problem();
                let x0 = uniform_start(p.dim());
                Ok((Arc::new(p), x0))
            }
            Dataset::PoissonCs { data, truth, noise } => {
                let b = sample_counts(
                    &data.a,
                    truth,
                    data.bg,
                    &mut noise.derive(seed.wrapping_add(1)),
                );
                let noisy = PoissonCsData::new(data.a.clone(), b, data.bg, data.lambda)?;
                let n = data.a.cols();
                Ok((Arc::new(noisy.to_problem()), vec![1.0; n]))
            }
            Dataset::Lasso(p) => Ok((p.clone(), uniform_start(p.dim()))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lasso_config() -> &'static str {
        r#"{"problem": {"kind": "lasso", "a": [[1.0]], "b": [3.0], "lambda": 1.0},
            "solvers": ["PDCAe1", {"name": "fista", "method": "sfista"}],
            "tolerances": [1e-2, 1e-6]}"#
    }

    #[test]
    fn parses_and_validates() {
        let cfg = RunConfig::from_json(lasso_config()).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.seeds, vec![0]);
        assert_eq!(cfg.max_iter, 10_000);
        assert_eq!(cfg.solvers[1].name(), "fista");
        assert!(matches!(
            cfg.solvers[1].method(cfg.application()).unwrap(),
            Method::Sfista(_)
        ));
    }

    #[test]
    fn default_tolerances_follow_the_problem() {
        let cfg = RunConfig::from_json(
            r#"{"problem": {"kind": "poisson-cs", "generate": {"n": 10, "m": 5, "k_nonzeros": 2}}, "solvers": ["SPDCAe1"]}"#,
        )
        .unwrap();
        assert_eq!(cfg.tolerances, vec![1e-1, 1e-2, 1e-3, 1e-4, 1e-5]);
    }

    #[test]
    fn rejects_bad_configs() {
        let base: serde_json::Value = serde_json::from_str(lasso_config()).unwrap();
        let mutate = |f: &dyn Fn(&mut serde_json::Value)| {
            let mut v = base.clone();
            f(&mut v);
            RunConfig::from_json(&v.to_string()).and_then(|c| c.validate())
        };
        assert!(mutate(&|v| v["solvers"] = serde_json::json!([])).is_err());
        assert!(mutate(&|v| v["tolerances"] = serde_json::json!([1e-6, 1e-2])).is_err());
        assert!(mutate(&|v| v["tolerances"] = serde_json::json!([-1.0])).is_err());
        assert!(mutate(&|v| v["solvers"] = serde_json::json!(["nope"])).is_err());
        assert!(mutate(&|v| v["solvers"] = serde_json::json!(["PDCAe1", "PDCAe1"])).is_err());
        assert!(mutate(&|v| v["bogus"] = serde_json::json!(1)).is_err());
        assert!(mutate(&|_| {}).is_ok());
    }
}
