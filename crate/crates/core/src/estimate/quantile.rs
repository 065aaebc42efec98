use alloc::vec;
use alloc::vec::Vec;

use super::{EstimateMethod, EstimateResult};
use crate::math::{ceil, exp, normal_cdf, sqrt};
use crate::{Error, Result};

pub const DEFAULT_QUANTILE_ITERATIONS: usize = 2;
/// Median of `|N(0, 1)|`, as rounded in the estimator.
const HALF_NORMAL_MEDIAN: f64 = 0.675;

/// Noise level from the order statistics of `|yhat|`, given the sparsity
/// ratio and signal level.
///
/// About `L = ceil(m exp(-tau))` entries (`tau = d rho`) are pure noise, so
/// the `l0 = ceil(L/2)`-th smallest `|yhat|` approximates the median of
/// `|eta|` and `sigma_0 = |yhat|_(l0) / 0.675`. Signal entries that fall
/// below that order statistic shift it down; each refinement moves the index
/// up by the expected number of them,
/// `ceil((m - L) * 2 (Phi(|yhat|_(l_i); 0, s_i) - 1/2))` with
/// `s_i^2 = 2 sigma_i^2 + sigma_s^2 tau / (1 - exp(-tau))`.
pub fn quantile_noise_estimate(
    yhat: &[f64],
    d: usize,
    rho: f64,
    sigma_s: f64,
    iterations: usize,
) -> Result<EstimateResult> {
    if yhat.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(rho > 0.0 && rho < 1.0) || d == 0 || !(sigma_s > 0.0) {
        return Err(Error::InvalidParameter(
            "need d > 0, rho in (0, 1), sigma_s > 0",
        ));
    }
    let m = yhat.len();
    let tau = d as f64 * rho;
    let zeros = m as f64 * exp(-tau);
    let big_l = ceil(zeros) as usize;
    if big_l == 0 || !zeros.is_finite() {
        return Err(Error::Degenerate(
            "no noise-only entries expected (tau too large)",
        ));
    }
    let big_l = big_l.min(m);
    let mut sorted: Vec<f64> = yhat.iter().map(|v| v.abs()).collect();
    sorted.sort_unstable_by(f64::total_cmp);
    // 1-based order statistic
    let stat = |l: usize| sorted[l.clamp(1, m) - 1];

    let l0 = big_l.div_ceil(2);
    let mut level = stat(l0);
    let mut sigma = level / HALF_NORMAL_MEDIAN;
    let signal_var = sigma_s * sigma_s * tau / (1.0 - exp(-tau));
    let mut index_trace = vec![l0];
    for _ in 0..iterations {
        let sd = sqrt(2.0 * sigma * sigma + signal_var);
        let below = (m - big_l) as f64 * 2.0 * (normal_cdf(level, 0.0, sd) - 0.5);
        let l = l0 + ceil(below.max(0.0)) as usize;
        index_trace.push(l);
        level = stat(l);
        sigma = level / HALF_NORMAL_MEDIAN;
    }
    Ok(EstimateResult {
        method: EstimateMethod::Quantile,
        sigma_n_hat: sigma,
        sigma_s_hat: None,
        rho_hat: None,
        iterations,
        flags: Vec::new(),
    })
}
