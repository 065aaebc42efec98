use alloc::vec::Vec;

use super::{noise_l1_moments, sigma_grid, success_check, SuccessCriterion};
use crate::decode::{decode_variant, ColumnExecutor, DecodeReport, DecoderOptions, Variant};
use crate::math::{sqrt, FRAC_2_PI};
use crate::model::{generate_problem, GenParams};
use crate::rng::seeded;
use crate::{Error, Result};

/// Seed offset between consecutive `rho` steps.
pub const RHO_STEP_SEED_STRIDE: u64 = 1_000_000;

/// One `(delta, sigma_n)` column of an experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub variant: Variant,
    pub n: usize,
    pub delta: f64,
    pub d: usize,
    pub sigma_s: f64,
    pub sigma_n: f64,
    pub criterion: SuccessCriterion,
    pub trials: usize,
    pub seed_base: u64,
    pub options: DecoderOptions,
}

impl SweepConfig {
    pub fn m(&self) -> usize {
        crate::math::floor(self.delta * self.n as f64) as usize
    }

    /// Generation parameters for `rho_step` (`rho = rho_step / 100`).
    pub fn params(&self, rho_step: usize, seed: u64) -> GenParams {
        GenParams::from_ratios(
            self.n,
            self.delta,
            rho_for_step(rho_step),
            self.d,
            self.sigma_s,
            self.sigma_n,
            seed,
        )
    }
}

/// Aggregate of all trials at one `(delta, rho, sigma_n)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionRecord {
    pub variant: Variant,
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

impl TransitionRecord {
    pub fn fraction(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }
}

/// Outcome of a single decode inside a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub success: bool,
    pub report: DecodeReport,
}

/// `rho = rho_step / 100`.
pub fn rho_for_step(rho_step: usize) -> f64 {
    rho_step as f64 / 100.0
}

/// `seed_base + trial + 10^6 rho_step` (wrapping).
pub fn trial_seed(seed_base: u64, trial: usize, rho_step: usize) -> u64 {
    seed_base
        .wrapping_add(trial as u64)
        .wrapping_add(RHO_STEP_SEED_STRIDE.wrapping_mul(rho_step as u64))
}

/// Generates and decodes trial `trial` of cell `rho_step`.
pub fn run_trial<E: ColumnExecutor + ?Sized>(
    config: &SweepConfig,
    rho_step: usize,
    trial: usize,
    executor: &E,
) -> Result<TrialOutcome> {
    let seed = trial_seed(config.seed_base, trial, rho_step);
    let params = config.params(rho_step, seed);
    if params.k == 0 {
        return Err(Error::InvalidDimensions(
            "rho * m rounds to an empty support",
        ));
    }
    let problem = generate_problem(&params, &mut seeded(seed))?;
    let report = decode_variant(
        &problem.matrix,
        &problem.yhat,
        config.variant,
        params.k,
        params.sigma_s,
        params.sigma_n,
        &config.options,
        executor,
    )?;
    let success = success_check(
        &problem.x,
        &report.xhat,
        &config.criterion,
        params.m,
        params.sigma_n,
    )?;
    Ok(TrialOutcome { success, report })
}

/// All trials of one cell, one after another. `wall_ms` is taken from the
/// reports, which the core leaves at zero.
pub fn run_cell<E: ColumnExecutor + ?Sized>(
    config: &SweepConfig,
    rho_step: usize,
    executor: &E,
) -> Result<TransitionRecord> {
    let mut outcomes = Vec::with_capacity(config.trials);
    for trial in 0..config.trials {
        outcomes.push(run_trial(config, rho_step, trial, executor)?);
    }
    Ok(record(config, rho_step, &outcomes))
}

impl TransitionRecord {
    /// Aggregates trial outcomes into a record.
    pub fn from_outcomes(config: &SweepConfig, rho_step: usize, outcomes: &[TrialOutcome]) -> Self {
        record(config, rho_step, outcomes)
    }
}

fn record(config: &SweepConfig, rho_step: usize, outcomes: &[TrialOutcome]) -> TransitionRecord {
    let params = config.params(rho_step, config.seed_base);
    let wall: f64 = outcomes.iter().map(|o| o.report.wall_ms).sum();
    TransitionRecord {
        variant: config.variant,
        n: params.n,
        m: params.m,
        k: params.k,
        d: params.d,
        delta: config.delta,
        rho: rho_for_step(rho_step),
        sigma_n: config.sigma_n,
        trials: outcomes.len(),
        successes: outcomes.iter().filter(|o| o.success).count(),
        mean_wall_ms: if outcomes.is_empty() {
            0.0
        } else {
            wall / outcomes.len() as f64
        },
        seed_base: config.seed_base,
    }
}

/// Raises `rho` from 0.01 in steps of 0.01 while at least one trial of the
/// previous cell succeeded, stopping before `rho` reaches 1. Steps where
/// `floor(rho m) = 0` are skipped.
///
/// `cell` produces the record for a `rho_step`; callers supply timing,
/// parallelism or cached records through it.
pub fn rho_sweep<F>(config: &SweepConfig, mut cell: F) -> Result<Vec<TransitionRecord>>
where
    F: FnMut(&SweepConfig, usize) -> Result<TransitionRecord>,
{
    if config.trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1"));
    }
    let first = (1..100)
        .find(|&s| config.params(s, 0).k > 0)
        .ok_or(Error::InvalidDimensions(
            "m too small for any nonzero sparsity",
        ))?;
    let mut records = Vec::new();
    for rho_step in first..100 {
        let rec = cell(config, rho_step)?;
        let done = rec.successes == 0;
        records.push(rec);
        if done {
            break;
        }
    }
    Ok(records)
}

/// Largest `rho` with a success fraction of at least one half.
pub fn majority_rho(records: &[TransitionRecord]) -> Option<f64> {
    records
        .iter()
        .filter(|r| 2 * r.successes >= r.trials)
        .map(|r| r.rho)
        .reduce(f64::max)
}

/// Sparsity ratio below which the clipped success threshold is active,
/// using `E ||x||_1 = rho m sigma_s sqrt(2/pi)`.
pub fn tol_rho(m: usize, sigma_s: f64, sigma_n: f64, criterion: &SuccessCriterion) -> f64 {
    let (mean, var) = noise_l1_moments(m, sigma_n);
    (mean + criterion.c1 * sqrt(var)) / (criterion.clip * m as f64 * sigma_s * sqrt(FRAC_2_PI))
}

/// Summary of one `rho` sweep inside a noise sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaPoint {
    pub sigma_n: f64,
    /// `None` when no cell reached 50% success.
    pub rho_star: Option<f64>,
    pub tol_rho: f64,
}

/// A [`rho_sweep`] for every noise level of [`sigma_grid`].
pub fn sigma_sweep<F>(
    config: &SweepConfig,
    mut cell: F,
) -> Result<(Vec<TransitionRecord>, Vec<SigmaPoint>)>
where
    F: FnMut(&SweepConfig, usize) -> Result<TransitionRecord>,
{
    let mut records = Vec::new();
    let mut points = Vec::new();
    for sigma_n in sigma_grid() {
        let cfg = SweepConfig { sigma_n, ..*config };
        let recs = rho_sweep(&cfg, &mut cell)?;
        points.push(SigmaPoint {
            sigma_n,
            rho_star: majority_rho(&recs),
            tol_rho: tol_rho(cfg.m(), cfg.sigma_s, sigma_n, &cfg.criterion),
        });
        records.extend(recs);
    }
    Ok((records, points))
}
