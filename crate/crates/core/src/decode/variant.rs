use super::score::{c_schedule, ScoreConfig};
use super::{parallel_l0, robust_l0_with, ColumnExecutor, DecodeReport, RobustConfig, Variant};
use crate::model::ExpanderMatrix;
use crate::posterior::GaussianPosterior;
use crate::{Error, Result};

/// Default `alpha`, capped at `d`.
pub const DEFAULT_ALPHA: f64 = 2.5;

/// Default sweep budget for Parallel-l0.
pub const DEFAULT_PARALLEL_ITERS: usize = 100;

/// Optional decoder overrides; `None` picks the default.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DecoderOptions {
    pub alpha: Option<f64>,
    /// Robust variants only; defaults to [`c_schedule`].
    pub c: Option<f64>,
    pub max_iters: Option<usize>,
}

impl DecoderOptions {
    pub fn alpha_for(&self, d: usize) -> f64 {
        self.alpha.unwrap_or(DEFAULT_ALPHA.min(d as f64))
    }
}

/// Runs `variant` on a sketch of a `k`-sparse signal.
///
/// Robust variants build their posterior from `(sigma_s, sigma_n, d, k/m)`
/// and reject `sigma_n = 0`; Parallel-l0 rejects `sigma_n > 0`.
#[allow(clippy::too_many_arguments)]
pub fn decode_variant<E: ColumnExecutor + ?Sized>(
    matrix: &ExpanderMatrix,
    yhat: &[f64],
    variant: Variant,
    k: usize,
    sigma_s: f64,
    sigma_n: f64,
    options: &DecoderOptions,
    executor: &E,
) -> Result<DecodeReport> {
    let alpha = options.alpha_for(matrix.d());
    let Some(mode) = variant.mode() else {
        if sigma_n > 0.0 {
            return Err(Error::NoisySketch);
        }
        return parallel_l0(
            matrix,
            yhat,
            alpha,
            options.max_iters.unwrap_or(DEFAULT_PARALLEL_ITERS),
        );
    };
    if sigma_n == 0.0 {
        return Err(Error::DegenerateNoise);
    }
    let (n, m) = (matrix.n() as f64, matrix.m() as f64);
    let rho = k as f64 / m;
    let c = options.c.unwrap_or_else(|| c_schedule(m / n, rho, mode));
    let posterior = GaussianPosterior::new(sigma_s, sigma_n, matrix.d(), rho)?;
    let score = ScoreConfig {
        mode,
        adaptive_k: variant.adaptive_k(),
        alpha,
        c,
        k,
        posterior,
    };
    let config = RobustConfig::new(score);
    let max_iters = options.max_iters.unwrap_or(config.max_iters);
    robust_l0_with(matrix, yhat, &config.score, max_iters, executor)
}
