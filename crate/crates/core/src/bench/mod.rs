//! Success and stopping criteria, experiment grids and transition points.

use alloc::vec::Vec;

mod sweep;

pub use sweep::{
    majority_rho, rho_for_step, rho_sweep, run_cell, run_trial, sigma_sweep, tol_rho, trial_seed,
    SigmaPoint, SweepConfig, TransitionRecord, TrialOutcome, RHO_STEP_SEED_STRIDE,
};

use crate::math::{sqrt, FRAC_2_PI};
use crate::model::SparseSignal;
use crate::{Error, Result};

/// Default cap on the relative-error threshold.
pub const DEFAULT_CLIP: f64 = 0.1;

/// Default lower bound on the relative-error threshold. Noiseless decodes
/// that subtract recovered columns carry rounding error of this order.
pub const DEFAULT_FLOOR: f64 = 1e-12;

/// `||x - xhat||_1 / ||x||_1 <= max(min((E + c1 sd) / ||x||_1, clip), floor)`
/// where `E`, `sd` are the mean and standard deviation of `||eta||_1`.
/// With `floor = 0` and no noise this is exact equality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuccessCriterion {
    pub c1: f64,
    pub clip: f64,
    pub floor: f64,
}

impl Default for SuccessCriterion {
    fn default() -> Self {
        Self {
            c1: 1.0,
            clip: DEFAULT_CLIP,
            floor: DEFAULT_FLOOR,
        }
    }
}

/// Mean and variance of `||eta||_1` for `eta ~ N(0, sigma^2 I_m)`.
pub fn noise_l1_moments(m: usize, sigma_n: f64) -> (f64, f64) {
    let m = m as f64;
    (
        m * sigma_n * sqrt(FRAC_2_PI),
        m * sigma_n * sigma_n * (1.0 - FRAC_2_PI),
    )
}

impl SuccessCriterion {
    /// Relative-error threshold for a signal of norm `x_l1`.
    pub fn threshold(&self, x_l1: f64, m: usize, sigma_n: f64) -> f64 {
        let (mean, var) = noise_l1_moments(m, sigma_n);
        ((mean + self.c1 * sqrt(var)) / x_l1)
            .min(self.clip)
            .max(self.floor)
    }

    /// Whether the unclipped bound already exceeds the clip value.
    pub fn clip_active(&self, x_l1: f64, m: usize, sigma_n: f64) -> bool {
        let (mean, var) = noise_l1_moments(m, sigma_n);
        (mean + self.c1 * sqrt(var)) / x_l1 >= self.clip
    }
}

pub fn success_check(
    x: &SparseSignal,
    xhat: &SparseSignal,
    criterion: &SuccessCriterion,
    m: usize,
    sigma_n: f64,
) -> Result<bool> {
    let norm = x.l1_norm();
    if norm == 0.0 {
        return Err(Error::ZeroSignal);
    }
    Ok(x.l1_distance(xhat) / norm <= criterion.threshold(norm, m, sigma_n))
}

/// `||r||_1 <= E ||eta||_1`.
pub fn stop_rule(residual_l1: f64, m: usize, sigma_n: f64) -> bool {
    residual_l1 <= noise_l1_moments(m, sigma_n).0
}

/// The 24-point undersampling grid: `0.02 p` for `p = 1..=4`, then
/// `0.1 + 89/1900 (p - 1)` for `p = 1..=20`.
pub fn delta_grid() -> Vec<f64> {
    let low = (1..=4).map(|p| 0.02 * p as f64);
    let high = (1..=20).map(|p| 0.1 + 89.0 / 1900.0 * (p - 1) as f64);
    low.chain(high).collect()
}

/// The 21-point noise grid `10^(-3 + i/10)`, `i = 0..=20`.
pub fn sigma_grid() -> Vec<f64> {
    (0..=20)
        .map(|i| libm::pow(10.0, -3.0 + i as f64 / 10.0))
        .collect()
}

/// 50% (or `level`) crossing of a success curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionPoint {
    pub rho_star: f64,
    /// Set when the curve never crosses `level`; `rho_star` is then the
    /// boundary of the sweep.
    pub undefined: bool,
}

/// Largest `rho` where the success fraction crosses `level` from above,
/// linearly interpolated between neighbouring grid points.
///
/// `points` are `(rho, fraction)` pairs sorted by `rho`.
pub fn transition_point(points: &[(f64, f64)], level: f64) -> Result<TransitionPoint> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    for w in points.windows(2).rev() {
        let ((r0, f0), (r1, f1)) = (w[0], w[1]);
        if f0 >= level && f1 < level {
            let t = (f0 - level) / (f0 - f1);
            return Ok(TransitionPoint {
                rho_star: r0 + t * (r1 - r0),
                undefined: false,
            });
        }
    }
    let all_above = points.iter().all(|&(_, f)| f >= level);
    let rho_star = if all_above {
        points[points.len() - 1].0
    } else {
        points[0].0
    };
    Ok(TransitionPoint {
        rho_star,
        undefined: true,
    })
}
