//! Estimating noise level, signal level and sparsity from the noisy sketch.

use alloc::vec::Vec;

mod em;
mod quantile;

pub use em::{em_estimate, EmConfig, MixtureFit};
pub use quantile::{quantile_noise_estimate, DEFAULT_QUANTILE_ITERATIONS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimateMethod {
    Quantile,
    Em,
}

impl EstimateMethod {
    pub fn name(self) -> &'static str {
        match self {
            EstimateMethod::Quantile => "quantile",
            EstimateMethod::Em => "em",
        }
    }
}

/// Soft warnings attached to an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimateFlag {
    /// EM stopped at the iteration cap; the best fit so far is reported.
    NoConvergence,
    /// The two fitted components are indistinguishable (e.g. pure noise), so
    /// signal level and sparsity are not identifiable.
    SingleComponent,
}

impl EstimateFlag {
    pub fn name(self) -> &'static str {
        match self {
            EstimateFlag::NoConvergence => "no-convergence",
            EstimateFlag::SingleComponent => "degenerate-single-component",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateResult {
    pub method: EstimateMethod,
    pub sigma_n_hat: f64,
    pub sigma_s_hat: Option<f64>,
    pub rho_hat: Option<f64>,
    pub iterations: usize,
    pub flags: Vec<EstimateFlag>,
}
