use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use super::score::{score_qe, score_qz, ScoreConfig};
use super::threshold::top_k;
use super::{l1, ColumnExecutor, DecodeReport, Sequential, Update};
use crate::bench::stop_rule;
use crate::math::{ceil, floor};
use crate::model::{ExpanderMatrix, SparseSignal};
use crate::{Error, Result};

/// Score configuration plus the sweep budget.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustConfig {
    pub score: ScoreConfig,
    pub max_iters: usize,
}

impl RobustConfig {
    /// `max_iters = 3 * ceil(1 / c)`.
    pub fn new(score: ScoreConfig) -> Self {
        let max_iters = 3 * ceil(1.0 / score.c) as usize;
        Self { score, max_iters }
    }
}

/// Robust-l0 with the single-threaded executor.
pub fn robust_l0(
    matrix: &ExpanderMatrix,
    yhat: &[f64],
    config: &ScoreConfig,
    max_iters: usize,
) -> Result<DecodeReport> {
    robust_l0_with(matrix, yhat, config, max_iters, &Sequential)
}

/// Read-only state shared by the per-column proposal work of one sweep.
struct Snapshot<'a> {
    matrix: &'a ExpanderMatrix,
    config: &'a ScoreConfig,
    t: f64,
    r: &'a [f64],
    /// `q_z(r_i | t)` per row.
    qz: &'a [f64],
    /// `1 - p_z_scaled(r_i) >= t` per row.
    open: &'a [bool],
}

impl Snapshot<'_> {
    /// At most one update per column: among rows passing the gate, the one
    /// with the largest `n_e - n_z`, then the largest local residual decrease.
    fn propose(&self, cols: Range<usize>) -> Vec<Update> {
        let alpha = self.config.alpha;
        let mut out = Vec::new();
        for j in cols {
            let col = self.matrix.column(j);
            if !col.iter().any(|&i| self.open[i as usize]) {
                continue;
            }
            let n_z: f64 = col.iter().map(|&l| self.qz[l as usize]).sum();
            let local_l1: f64 = col.iter().map(|&l| self.r[l as usize].abs()).sum();
            let mut best: Option<(f64, f64, f64)> = None;
            for &i in col {
                if !self.open[i as usize] {
                    continue;
                }
                let ri = self.r[i as usize];
                let mut n_e = 0.0;
                let mut weighted = 0.0;
                for &l in col {
                    let rl = self.r[l as usize];
                    let q = score_qe(ri - rl, self.t, self.config);
                    n_e += q;
                    weighted += rl * q;
                }
                if !(n_e > 0.0) || n_e - n_z < alpha {
                    continue;
                }
                let omega = weighted / n_e;
                let moved: f64 = col
                    .iter()
                    .map(|&l| (self.r[l as usize] - omega).abs())
                    .sum();
                if moved > local_l1 {
                    continue;
                }
                let cand = (n_e - n_z, local_l1 - moved, omega);
                let better = match best {
                    None => true,
                    Some((s, g, _)) => cand.0 > s || (cand.0 == s && cand.1 > g),
                };
                if better {
                    best = Some(cand);
                }
            }
            if let Some((_, _, omega)) = best {
                out.push((j, omega));
            }
        }
        out
    }
}

/// Robust-l0.
///
/// Starting from `xhat = 0`, `t = 1`, every sweep copies the accepted state,
/// proposes updates for all columns against that frozen residual, applies
/// them, hard-thresholds to `k` entries and recomputes the residual. The sweep
/// is accepted only if it lowers `||r||_1`. `t` drops by `c` per sweep; the
/// run ends when `t <= 0`, after `max_iters` sweeps, or once the accepted
/// residual is within the expected noise floor `m sigma_n sqrt(2/pi)`
/// (reported as converged).
///
/// With `adaptive_k` the posterior is rebuilt after each accepted sweep with
/// `rho = k0 / m`, `k0 = max(k - sum_{j in supp} p_z_scaled(xhat_j), floor(m/100))`.
pub fn robust_l0_with<E: ColumnExecutor + ?Sized>(
    matrix: &ExpanderMatrix,
    yhat: &[f64],
    config: &ScoreConfig,
    max_iters: usize,
    executor: &E,
) -> Result<DecodeReport> {
    let (n, m) = (matrix.n(), matrix.m());
    if yhat.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: yhat.len(),
        });
    }
    config.validate()?;
    let sigma_n = config.posterior.sigma_n();
    if sigma_n == 0.0 {
        return Err(Error::DegenerateNoise);
    }

    let mut cfg = config.clone();
    let mut xhat = vec![0.0; n];
    let mut support: Vec<usize> = Vec::new();
    let mut rhat = yhat.to_vec();
    let mut rhat_l1 = l1(&rhat);
    let mut trace = vec![rhat_l1];
    let mut t = 1.0;
    let mut iterations = 0;
    let mut converged = stop_rule(rhat_l1, m, sigma_n);

    let mut x_work = vec![0.0; n];
    let mut r_work = vec![0.0; m];
    let mut qz = vec![0.0; m];
    let mut open = vec![false; m];

    while !converged && t > 0.0 && iterations < max_iters {
        iterations += 1;
        for i in 0..m {
            let ri = rhat[i];
            qz[i] = score_qz(ri, t, &cfg);
            open[i] = 1.0 - cfg.posterior.pz_scaled(ri) >= t;
        }
        let snapshot = Snapshot {
            matrix,
            config: &cfg,
            t,
            r: &rhat,
            qz: &qz,
            open: &open,
        };
        let updates = executor.propose(n, &|cols| snapshot.propose(cols));

        x_work.copy_from_slice(&xhat);
        for &(j, omega) in &updates {
            x_work[j] += omega;
        }
        let mut touched: Vec<usize> = support
            .iter()
            .copied()
            .chain(updates.iter().map(|u| u.0))
            .collect();
        touched.sort_unstable();
        touched.dedup();
        touched.retain(|&j| x_work[j] != 0.0);
        let kept = top_k(&x_work, &touched, cfg.k);
        for &j in &touched {
            if kept.binary_search(&j).is_err() {
                x_work[j] = 0.0;
            }
        }
        matrix.residual_dense(yhat, &x_work, &kept, &mut r_work);
        let r_l1 = l1(&r_work);
        t -= cfg.c;

        if r_l1 < rhat_l1 {
            core::mem::swap(&mut xhat, &mut x_work);
            core::mem::swap(&mut rhat, &mut r_work);
            support = kept;
            rhat_l1 = r_l1;
            trace.push(r_l1);
            if cfg.adaptive_k {
                let mass: f64 = support
                    .iter()
                    .map(|&j| cfg.posterior.pz_scaled(xhat[j]))
                    .sum();
                let k0 = (config.k as f64 - mass)
                    .max(floor(m as f64 / 100.0))
                    .max(1.0);
                cfg.posterior = cfg.posterior.with_rho((k0 / m as f64).min(0.999))?;
            }
            converged = stop_rule(rhat_l1, m, sigma_n);
        }
    }

    let xhat = SparseSignal::from_pairs(n, support.iter().map(|&j| (j, xhat[j])))?;
    Ok(DecodeReport {
        xhat,
        iterations,
        residual_l1_trace: trace,
        converged,
        wall_ms: 0.0,
        final_t: t,
    })
}
