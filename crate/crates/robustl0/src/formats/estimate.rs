use std::path::Path;

use robustl0_core::estimate::{EstimateFlag, EstimateMethod, EstimateResult};
use serde::{Deserialize, Serialize};

use super::{read_json, write_json};
use crate::{Error, Result};

/// Serialized estimator output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateFile {
    pub method: String,
    pub sigma_n_hat: f64,
    pub sigma_s_hat: Option<f64>,
    pub rho_hat: Option<f64>,
    pub iterations: usize,
    pub flags: Vec<String>,
}

impl From<&EstimateResult> for EstimateFile {
    fn from(r: &EstimateResult) -> Self {
        EstimateFile {
            method: r.method.name().to_string(),
            sigma_n_hat: r.sigma_n_hat,
            sigma_s_hat: r.sigma_s_hat,
            rho_hat: r.rho_hat,
            iterations: r.iterations,
            flags: r.flags.iter().map(|f| f.name().to_string()).collect(),
        }
    }
}

impl EstimateFile {
    pub fn check(&self, path: &Path) -> Result<()> {
        let bad = |msg: &str| Err(Error::format(path, msg));
        if ![EstimateMethod::Quantile, EstimateMethod::Em]
            .iter()
            .any(|m| m.name() == self.method)
        {
            return bad("unknown method");
        }
        if !(self.sigma_n_hat >= 0.0) {
            return bad("sigma_n_hat must be non-negative");
        }
        if self.rho_hat.is_some_and(|r| !(r > 0.0 && r < 1.0)) {
            return bad("rho_hat outside (0, 1)");
        }
        let known = [EstimateFlag::NoConvergence, EstimateFlag::SingleComponent];
        if self
            .flags
            .iter()
            .any(|f| !known.iter().any(|k| k.name() == f))
        {
            return bad("unknown flag");
        }
        Ok(())
    }
}

pub fn write_estimate(path: &Path, result: &EstimateResult) -> Result<()> {
    write_json(path, &EstimateFile::from(result))
}

pub fn read_estimate(path: &Path) -> Result<EstimateFile> {
    let file: EstimateFile = read_json(path)?;
    file.check(path)?;
    Ok(file)
}
