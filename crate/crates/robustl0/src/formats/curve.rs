use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const CURVE_HEADER: [&str; 8] = [
    "omega",
    "pz",
    "pe",
    "pz_scaled",
    "pe_scaled",
    "pz_hat",
    "pe_hat",
    "bin_count",
];

/// One grid point of a probability curve. Empirical columns are empty when
/// not requested or when the bin is empty; `bin_count` is the number of
/// sketch entries in the bin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub omega: f64,
    pub pz: f64,
    pub pe: f64,
    pub pz_scaled: f64,
    pub pe_scaled: f64,
    pub pz_hat: Option<f64>,
    pub pe_hat: Option<f64>,
    pub bin_count: Option<u64>,
}

pub fn write_curve(path: &Path, rows: &[CurveRow]) -> Result<()> {
    let err = |source| Error::Csv {
        path: path.into(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(err)?;
    for row in rows {
        w.serialize(row).map_err(err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a curve and checks the header and value ranges.
pub fn read_curve(path: &Path) -> Result<Vec<CurveRow>> {
    let err = |source| Error::Csv {
        path: path.into(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(err)?;
    if r.headers().map_err(err)?.iter().ne(CURVE_HEADER) {
        return Err(Error::format(path, "unexpected header"));
    }
    let rows = r
        .deserialize()
        .collect::<std::result::Result<Vec<CurveRow>, _>>()
        .map_err(err)?;
    let unit = |p: f64| (0.0..=1.0).contains(&p);
    for row in &rows {
        let probs = [row.pz, row.pe, row.pz_scaled, row.pe_scaled];
        if !probs
            .into_iter()
            .chain(row.pz_hat)
            .chain(row.pe_hat)
            .all(unit)
        {
            return Err(Error::format(path, "probability outside [0, 1]"));
        }
    }
    Ok(rows)
}
