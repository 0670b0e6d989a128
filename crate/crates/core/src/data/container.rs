use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::problems::{LogRegData, PoissonCsData};

/// A generated problem instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Instance {
    Logistic {
        data: LogRegData,
        truth: Option<Vec<f64>>,
    },
    PoissonCs {
        data: PoissonCsData,
        truth: Option<Vec<f64>>,
    },
}

impl Instance {
    pub fn shape(&self) -> (usize, usize) {
        let a = match self {
            Instance::Logistic { data, .. } => &data.a,
            Instance::PoissonCs { data, .. } => &data.a,
        };
        (a.rows(), a.cols())
    }
}

/// Self-describing JSON file holding an instance and how it was made.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceContainer {
    pub shape: (usize, usize),
    pub seed: Option<u64>,
    pub params: serde_json::Value,
    pub payload: Instance,
}

impl InstanceContainer {
    pub fn new(payload: Instance, seed: Option<u64>, params: serde_json::Value) -> Self {
        Self {
            shape: payload.shape(),
            seed,
            params,
            payload,
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, serde_json::to_string(self)?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{gen_poisson_cs, PoissonCsParams, RngSpec};

    #[test]
    fn json_round_trip() {
        let params = PoissonCsParams {
            n: 12,
            m: 5,
            k_nonzeros: 2,
            ..Default::default()
        };
        let (data, truth) = gen_poisson_cs(&params, &mut RngSpec::new(4).rng()).unwrap();
        let c = InstanceContainer::new(
            Instance::PoissonCs {
                data,
                truth: Some(truth),
            },
            Some(4),
            serde_json::to_value(&params).unwrap(),
        );
        assert_eq!(c.shape, (5, 12));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("inst.json");
        c.save(&path).unwrap();
        assert_eq!(InstanceContainer::load(&path).unwrap(), c);
    }
}
