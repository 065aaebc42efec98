use crate::posterior::GaussianPosterior;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScoreMode {
    /// Scores are the scaled posteriors themselves.
    Continuous,
    /// Scores are indicators of the scaled posteriors against `t`.
    Quantised,
}

/// Everything Robust-l0 needs to score candidate updates.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreConfig {
    pub mode: ScoreMode,
    pub adaptive_k: bool,
    /// Minimum `n_e - n_z` for an update, in `(1, d]`.
    pub alpha: f64,
    /// Decrement of `t` per sweep, in `(0, 1)`.
    pub c: f64,
    /// Sparsity prior; also the hard-threshold level.
    pub k: usize,
    pub posterior: GaussianPosterior,
}

impl ScoreConfig {
    pub fn validate(&self) -> Result<()> {
        let d = self.posterior.d() as f64;
        if !(self.alpha > 1.0 && self.alpha <= d) {
            return Err(Error::InvalidParameter("alpha must lie in (1, d]"));
        }
        if !(self.c > 0.0 && self.c < 1.0) {
            return Err(Error::InvalidParameter("c must lie in (0, 1)"));
        }
        Ok(())
    }
}

/// Equality score `q_e(delta | t)`.
pub fn score_qe(delta: f64, t: f64, config: &ScoreConfig) -> f64 {
    let p = config.posterior.pe_scaled(delta);
    match config.mode {
        ScoreMode::Continuous => p,
        ScoreMode::Quantised => (p >= t) as u8 as f64,
    }
}

/// Zero score `q_z(r | t)`.
pub fn score_qz(r: f64, t: f64, config: &ScoreConfig) -> f64 {
    let p = config.posterior.pz_scaled(r);
    match config.mode {
        ScoreMode::Continuous => p,
        ScoreMode::Quantised => (p >= 1.0 - t) as u8 as f64,
    }
}

/// Sweep decrement `c` for undersampling `delta` and sparsity `rho`.
pub fn c_schedule(delta: f64, rho: f64, mode: ScoreMode) -> f64 {
    if delta <= 0.05 {
        return 0.01;
    }
    match mode {
        ScoreMode::Continuous => 0.025,
        ScoreMode::Quantised if rho <= 0.1 => 0.05,
        ScoreMode::Quantised if rho <= 0.2 => 0.075,
        ScoreMode::Quantised => 0.1,
    }
}
