//! Combinatorial compressed sensing over expander sketches.
//!
//! The crate is `no_std` (it needs `alloc`) and holds the algorithmic core:
//!
//! - [`model`]: the generative model, expander matrices, sparse signals and
//!   the sparse matrix-vector product.
//! - [`posterior`]: closed-form Gaussian posteriors for "this sketch entry is
//!   zero" and "these two entries are equal", plus Monte-Carlo machinery for
//!   checking them.
//! - [`decode`]: the noiseless Parallel-l0 decoder and the noise-robust
//!   Robust-l0 decoder with its four variants.
//! - [`estimate`]: noise/sparsity estimators working from the noisy sketch
//!   alone.
//! - [`bench`]: success and stopping criteria, experiment grids and
//!   transition-point extraction.
//!
//! IO, timing, threading and the command-line front end live in the
//! `robustl0` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bench;
pub mod decode;
mod error;
pub mod estimate;
pub mod math;
pub mod model;
pub mod posterior;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::decode::{
        parallel_l0, robust_l0, DecodeReport, RobustConfig, ScoreConfig, ScoreMode, Variant,
    };
    pub use crate::model::{
        generate_expander, generate_problem, ExpanderMatrix, GenParams, ProblemInstance,
        SparseSignal,
    };
    pub use crate::posterior::GaussianPosterior;
    pub use crate::rng::Rng64;
    pub use crate::{Error, Result};
}
