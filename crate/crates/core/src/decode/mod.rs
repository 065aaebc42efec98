//! Expander l0 decoders.
//!
//! [`parallel_l0`] recovers dissociated signals from noiseless sketches by
//! exact value matching. [`robust_l0`] replaces the exact "is zero" and "are
//! equal" tests with posterior scores and sweeps a confidence threshold `t`
//! from 1 down to 0, accepting a sweep only when it lowers the residual.

use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;
use core::str::FromStr;

use crate::model::SparseSignal;
use crate::Error;

mod parallel;
mod robust;
mod score;
mod threshold;
mod variant;

pub use parallel::{parallel_l0, EQUALITY_TOL};
pub use robust::{robust_l0, robust_l0_with, RobustConfig};
pub use score::{c_schedule, score_qe, score_qz, ScoreConfig, ScoreMode};
pub use threshold::hard_threshold;
pub use variant::{decode_variant, DecoderOptions, DEFAULT_ALPHA, DEFAULT_PARALLEL_ITERS};

/// Result of a decoder run.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeReport {
    pub xhat: SparseSignal,
    /// Sweeps executed.
    pub iterations: usize,
    /// `||r||_1` of the initial residual followed by every accepted residual.
    pub residual_l1_trace: Vec<f64>,
    pub converged: bool,
    /// Filled in by callers that time the run; the core has no clock.
    pub wall_ms: f64,
    /// Sweep threshold when the run stopped (1 for Parallel-l0).
    pub final_t: f64,
}

impl DecodeReport {
    pub fn final_residual_l1(&self) -> f64 {
        self.residual_l1_trace.last().copied().unwrap_or(0.0)
    }
}

/// Decoder variants by their published names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    RobustL0,
    RobustL0Adaptive,
    RobustL0Quantised,
    RobustL0AdaptiveQuantised,
    ParallelL0,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::RobustL0,
        Variant::RobustL0Adaptive,
        Variant::RobustL0Quantised,
        Variant::RobustL0AdaptiveQuantised,
        Variant::ParallelL0,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::RobustL0 => "robust-l0",
            Variant::RobustL0Adaptive => "robust-l0-adaptive",
            Variant::RobustL0Quantised => "robust-l0-quantised",
            Variant::RobustL0AdaptiveQuantised => "robust-l0-adaptive-quantised",
            Variant::ParallelL0 => "parallel-l0",
        }
    }

    /// Score mode, or `None` for Parallel-l0.
    pub fn mode(self) -> Option<ScoreMode> {
        match self {
            Variant::RobustL0 | Variant::RobustL0Adaptive => Some(ScoreMode::Continuous),
            Variant::RobustL0Quantised | Variant::RobustL0AdaptiveQuantised => {
                Some(ScoreMode::Quantised)
            }
            Variant::ParallelL0 => None,
        }
    }

    pub fn adaptive_k(self) -> bool {
        matches!(
            self,
            Variant::RobustL0Adaptive | Variant::RobustL0AdaptiveQuantised
        )
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or(Error::InvalidParameter("unknown decoder variant"))
    }
}

/// A proposed `x_j += value` update.
pub type Update = (usize, f64);

/// Runs per-column proposal work. Implementations may split the column
/// range across workers but must return updates in ascending column order.
pub trait ColumnExecutor {
    fn propose(&self, n: usize, work: &(dyn Fn(Range<usize>) -> Vec<Update> + Sync))
        -> Vec<Update>;
}

/// Single-threaded executor.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl ColumnExecutor for Sequential {
    fn propose(
        &self,
        n: usize,
        work: &(dyn Fn(Range<usize>) -> Vec<Update> + Sync),
    ) -> Vec<Update> {
        work(0..n)
    }
}

pub(crate) fn l1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}
