use std::collections::BTreeMap;
use std::path::Path;

use robustl0_core::decode::{DecodeReport, Variant};
use robustl0_core::model::SparseSignal;
use serde::{Deserialize, Serialize};

use super::{read_json, write_json};
use crate::{Error, Result};

/// Serialized decoder output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportFile {
    pub xhat: BTreeMap<usize, f64>,
    pub iterations: usize,
    pub residual_l1: Vec<f64>,
    pub converged: bool,
    pub wall_ms: f64,
    pub final_t: f64,
    pub variant: String,
}

impl ReportFile {
    pub fn new(report: &DecodeReport, variant: Variant) -> Self {
        ReportFile {
            xhat: report.xhat.iter().collect(),
            iterations: report.iterations,
            residual_l1: report.residual_l1_trace.clone(),
            converged: report.converged,
            wall_ms: report.wall_ms,
            final_t: report.final_t,
            variant: variant.name().to_string(),
        }
    }

    /// Rebuilds the report for a signal of dimension `n`.
    pub fn to_report(&self, n: usize, path: &Path) -> Result<(DecodeReport, Variant)> {
        let variant = self
            .variant
            .parse()
            .map_err(|_| Error::format(path, "unknown variant"))?;
        let xhat = SparseSignal::from_pairs(n, self.xhat.iter().map(|(&j, &v)| (j, v)))?;
        let report = DecodeReport {
            xhat,
            iterations: self.iterations,
            residual_l1_trace: self.residual_l1.clone(),
            converged: self.converged,
            wall_ms: self.wall_ms,
            final_t: self.final_t,
        };
        Ok((report, variant))
    }
}

pub fn write_report(path: &Path, report: &DecodeReport, variant: Variant) -> Result<()> {
    write_json(path, &ReportFile::new(report, variant))
}

/// Reads a report and checks the variant name and trace monotonicity.
pub fn read_report(path: &Path) -> Result<ReportFile> {
    let file: ReportFile = read_json(path)?;
    if file.variant.parse::<Variant>().is_err() {
        return Err(Error::format(path, "unknown variant"));
    }
    if file.residual_l1.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::format(path, "residual trace increases"));
    }
    Ok(file)
}
