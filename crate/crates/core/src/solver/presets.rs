//! Named solver configurations used by the benchmarks.
//!
//! The digit says whether the line search is non-monotone (`1`) or monotone
//! (`0`); the leading `S` marks the scaled variants.

use serde::{Deserialize, Serialize};

use crate::accel::BetaFamily;
use crate::linesearch::{BacktrackConfig, BacktrackMode};
use crate::metric::MetricStrategy;

use super::{Method, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Application {
    Logistic,
    PoissonCs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Preset {
    #[serde(rename = "SPDCAe1")]
    Spdcae1,
    #[serde(rename = "PDCAe1")]
    Pdcae1,
    #[serde(rename = "SPDCAe0")]
    Spdcae0,
    #[serde(rename = "PDCAe0")]
    Pdcae0,
    /// Fixed step at the Lipschitz bound with fixed and adaptive restart.
    #[serde(rename = "pDCAe")]
    FixedPdcae,
    #[serde(rename = "ADCA")]
    Adca,
}

impl Preset {
    pub const ALL: [Preset; 6] = [
        Preset::Spdcae1,
        Preset::Pdcae1,
        Preset::Spdcae0,
        Preset::Pdcae0,
        Preset::FixedPdcae,
        Preset::Adca,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Spdcae1 => "SPDCAe1",
            Preset::Pdcae1 => "PDCAe1",
            Preset::Spdcae0 => "SPDCAe0",
            Preset::Pdcae0 => "PDCAe0",
            Preset::FixedPdcae => "pDCAe",
            Preset::Adca => "ADCA",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn method(self, app: Application) -> Method {
        let restart = BetaFamily::FixedAdaptiveRestart { t2: 200 };
        let scaled = match app {
            Application::Logistic => MetricStrategy::adagrad(),
            Application::PoissonCs => MetricStrategy::split_gradient(),
        };
        // Initial trial L for the scaled and the unscaled variants.
        let (l_scaled, l_plain) = match app {
            Application::Logistic => (1.0, 0.1),
            Application::PoissonCs => (0.1, 1e-5),
        };
        let nonmonotone = |l_init| BacktrackConfig {
            eta: 2.0,
            mode: BacktrackMode::Nonmonotone,
            l_init,
            l_floor: 1e-10,
            ..BacktrackConfig::default()
        };
        let monotone = |l_init| BacktrackConfig::monotone(l_init, 1.2);
        let cfg = |backtrack, metric| SolverConfig {
            backtrack,
            beta: restart,
            metric,
            ..SolverConfig::default()
        };
        match self {
            Preset::Spdcae1 => Method::Spdcae(cfg(nonmonotone(l_scaled), scaled)),
            Preset::Pdcae1 => Method::Spdcae(cfg(nonmonotone(l_plain), MetricStrategy::Identity)),
            Preset::Spdcae0 => Method::Spdcae(cfg(monotone(l_scaled), scaled)),
            Preset::Pdcae0 => Method::Spdcae(cfg(monotone(l_plain), MetricStrategy::Identity)),
            Preset::FixedPdcae => Method::Pdcae {
                l_fixed: None,
                beta: restart,
            },
            Preset::Adca => Method::Adca {
                l_fixed: None,
                q: 3,
            },
        }
    }
}
