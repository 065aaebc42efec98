//! File formats, timed and parallel experiment sweeps, and the `robustl0`
//! command-line tool on top of [`robustl0_core`].

pub use robustl0_core as core;

pub mod cli;
mod error;
pub mod exec;
pub mod formats;
pub mod harness;

pub use error::{Error, Result};
