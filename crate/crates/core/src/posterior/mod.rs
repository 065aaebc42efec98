//! Posterior probabilities that a clean sketch entry is zero (`p_z`) or that
//! two clean entries are equal (`p_e`), given the noisy observation.

mod empirical;
mod gaussian;
mod mixture;

pub use empirical::{empirical_posteriors, EmpiricalPosterior, MAX_PAIRS_PER_INSTANCE};
pub use gaussian::{
    gaussian_pdf, remainder_e, remainder_z, series_tail, GaussianPosterior, DEFAULT_TRUNCATION,
};
pub use mixture::{mixture_sample, sparse_sum_sample};
