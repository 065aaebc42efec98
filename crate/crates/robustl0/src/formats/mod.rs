//! On-disk formats: problem and report JSON, probability-curve and results
//! CSV.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::{Error, Result};

mod curve;
mod estimate;
mod problem;
mod records;
mod report;

pub use curve::{read_curve, write_curve, CurveRow, CURVE_HEADER};
pub use estimate::{read_estimate, write_estimate, EstimateFile};
pub use problem::{read_problem, write_problem, ProblemData, ProblemFile};
pub use records::{append_records, read_records, RecordRow, RECORD_HEADER};
pub use report::{read_report, write_report, ReportFile};

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec(value).map_err(|source| Error::Json {
        path: path.into(),
        source,
    })?;
    bytes.push(b'\n');
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(&bytes).map_err(|e| Error::io(path, e))
}

pub(crate) fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_slice(&bytes).map_err(|source| Error::Json {
        path: path.into(),
        source,
    })
}
