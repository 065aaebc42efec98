//! Timed, parallel and resumable versions of the core sweeps.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use robustl0_core::bench::{self, SigmaPoint, SweepConfig, TransitionRecord, TrialOutcome};
use robustl0_core::decode::{Sequential, Variant};

use crate::formats::{append_records, read_records};
use crate::Result;

/// Identifies a cell across runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct CellKey {
    variant: Variant,
    n: usize,
    d: usize,
    delta: u64,
    rho: u64,
    sigma_n: u64,
    trials: usize,
    seed_base: u64,
}

impl CellKey {
    fn of(r: &TransitionRecord) -> Self {
        CellKey {
            variant: r.variant,
            n: r.n,
            d: r.d,
            delta: r.delta.to_bits(),
            rho: r.rho.to_bits(),
            sigma_n: r.sigma_n.to_bits(),
            trials: r.trials,
            seed_base: r.seed_base,
        }
    }

    fn for_cell(cfg: &SweepConfig, rho_step: usize) -> Self {
        CellKey {
            variant: cfg.variant,
            n: cfg.n,
            d: cfg.d,
            delta: cfg.delta.to_bits(),
            rho: bench::rho_for_step(rho_step).to_bits(),
            sigma_n: cfg.sigma_n.to_bits(),
            trials: cfg.trials,
            seed_base: cfg.seed_base,
        }
    }
}

/// One trial with its decode timed.
pub fn timed_trial(
    cfg: &SweepConfig,
    rho_step: usize,
    trial: usize,
) -> robustl0_core::Result<TrialOutcome> {
    let start = Instant::now();
    let mut outcome = bench::run_trial(cfg, rho_step, trial, &Sequential)?;
    outcome.report.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(outcome)
}

/// Runs the trials of a cell on the current rayon pool.
pub fn parallel_cell(
    cfg: &SweepConfig,
    rho_step: usize,
) -> robustl0_core::Result<TransitionRecord> {
    let outcomes = (0..cfg.trials)
        .into_par_iter()
        .map(|t| timed_trial(cfg, rho_step, t))
        .collect::<robustl0_core::Result<Vec<_>>>()?;
    Ok(TransitionRecord::from_outcomes(cfg, rho_step, &outcomes))
}

/// Runs cells on a worker pool, reusing cells already present in the
/// output file and appending new ones as they finish.
pub struct SweepRunner {
    pool: rayon::ThreadPool,
    out: Option<PathBuf>,
    known: HashMap<CellKey, TransitionRecord>,
    /// Cells computed by this runner (not loaded from disk).
    pub computed: usize,
}

impl SweepRunner {
    pub fn new(jobs: usize, out: Option<&Path>) -> Result<Self> {
        let known = match out {
            Some(p) => read_records(p)?
                .into_iter()
                .map(|r| (CellKey::of(&r), r))
                .collect(),
            None => HashMap::new(),
        };
        Ok(SweepRunner {
            pool: crate::exec::build_pool(jobs),
            out: out.map(Path::to_path_buf),
            known,
            computed: 0,
        })
    }

    pub fn cell(&mut self, cfg: &SweepConfig, rho_step: usize) -> Result<TransitionRecord> {
        let key = CellKey::for_cell(cfg, rho_step);
        if let Some(r) = self.known.get(&key) {
            return Ok(r.clone());
        }
        let rec = self.pool.install(|| parallel_cell(cfg, rho_step))?;
        if let Some(p) = &self.out {
            append_records(p, std::slice::from_ref(&rec))?;
        }
        self.known.insert(key, rec.clone());
        self.computed += 1;
        Ok(rec)
    }

    pub fn rho_sweep(&mut self, cfg: &SweepConfig) -> Result<Vec<TransitionRecord>> {
        let mut failure = None;
        let recs = bench::rho_sweep(cfg, |c, s| {
            self.cell(c, s).map_err(|e| {
                failure = Some(e);
                robustl0_core::Error::InvalidParameter("sweep aborted")
            })
        });
        match (recs, failure) {
            (_, Some(e)) => Err(e),
            (r, None) => Ok(r?),
        }
    }

    /// A `rho` sweep at every `delta`.
    pub fn phase(&mut self, cfg: &SweepConfig, deltas: &[f64]) -> Result<Vec<TransitionRecord>> {
        let mut all = Vec::new();
        for &delta in deltas {
            all.extend(self.rho_sweep(&SweepConfig { delta, ..*cfg })?);
        }
        Ok(all)
    }

    pub fn sigma_sweep(
        &mut self,
        cfg: &SweepConfig,
    ) -> Result<(Vec<TransitionRecord>, Vec<SigmaPoint>)> {
        let mut failure = None;
        let out = bench::sigma_sweep(cfg, |c, s| {
            self.cell(c, s).map_err(|e| {
                failure = Some(e);
                robustl0_core::Error::InvalidParameter("sweep aborted")
            })
        });
        match (out, failure) {
            (_, Some(e)) => Err(e),
            (r, None) => Ok(r?),
        }
    }
}
