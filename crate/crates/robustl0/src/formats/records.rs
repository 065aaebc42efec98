use std::fs::{self, OpenOptions};
use std::path::Path;

use robustl0_core::bench::TransitionRecord;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const RECORD_HEADER: [&str; 12] = [
    "variant",
    "n",
    "m",
    "k",
    "d",
    "delta",
    "rho",
    "sigma_n",
    "trials",
    "successes",
    "mean_wall_ms",
    "seed_base",
];

/// One results-CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordRow {
    pub variant: String,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub d: usize,
    pub delta: f64,
    pub rho: f64,
    pub sigma_n: f64,
    pub trials: usize,
    pub successes: usize,
    pub mean_wall_ms: f64,
    pub seed_base: u64,
}

impl From<&TransitionRecord> for RecordRow {
    fn from(r: &TransitionRecord) -> Self {
        RecordRow {
            variant: r.variant.name().to_string(),
            n: r.n,
            m: r.m,
            k: r.k,
            d: r.d,
            delta: r.delta,
            rho: r.rho,
            sigma_n: r.sigma_n,
            trials: r.trials,
            successes: r.successes,
            mean_wall_ms: r.mean_wall_ms,
            seed_base: r.seed_base,
        }
    }
}

impl RecordRow {
    pub fn to_record(&self) -> Option<TransitionRecord> {
        Some(TransitionRecord {
            variant: self.variant.parse().ok()?,
            n: self.n,
            m: self.m,
            k: self.k,
            d: self.d,
            delta: self.delta,
            rho: self.rho,
            sigma_n: self.sigma_n,
            trials: self.trials,
            successes: self.successes,
            mean_wall_ms: self.mean_wall_ms,
            seed_base: self.seed_base,
        })
    }
}

/// Reads a results file; a missing file reads as empty. A torn final line
/// (no trailing newline) is ignored.
pub fn read_records(path: &Path) -> Result<Vec<TransitionRecord>> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(Error::io(path, e)),
    };
    let complete = &text[..text.rfind('\n').map_or(0, |i| i + 1)];
    if complete.is_empty() {
        return Ok(Vec::new());
    }
    let err = |source| Error::Csv {
        path: path.into(),
        source,
    };
    let mut r = csv::Reader::from_reader(complete.as_bytes());
    if r.headers().map_err(err)?.iter().ne(RECORD_HEADER) {
        return Err(Error::format(path, "unexpected header"));
    }
    let mut out = Vec::new();
    for row in r.deserialize::<RecordRow>() {
        let row = row.map_err(err)?;
        if row.successes > row.trials {
            return Err(Error::format(path, "successes exceed trials"));
        }
        out.push(
            row.to_record()
                .ok_or_else(|| Error::format(path, "unknown variant"))?,
        );
    }
    Ok(out)
}

/// Appends records, writing the header first if the file is new or empty
/// and dropping a torn final line left by an interrupted run.
pub fn append_records(path: &Path, records: &[TransitionRecord]) -> Result<()> {
    let io = |e| Error::io(path, e);
    let existing = match fs::read(path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
        Err(e) => return Err(io(e)),
    };
    let keep = existing
        .iter()
        .rposition(|&b| b == b'\n')
        .map_or(0, |i| i + 1);
    if keep != existing.len() {
        let f = OpenOptions::new().write(true).open(path).map_err(io)?;
        f.set_len(keep as u64).map_err(io)?;
    }
    let file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(io)?;
    let mut w = csv::WriterBuilder::new()
        .has_headers(keep == 0)
        .from_writer(file);
    let err = |source| Error::Csv {
        path: path.into(),
        source,
    };
    for r in records {
        w.serialize(RecordRow::from(r)).map_err(err)?;
    }
    w.flush().map_err(io)
}
