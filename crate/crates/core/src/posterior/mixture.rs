//! Samplers for sparse random sums and their compound-Poisson limit.
//!
//! Both samplers draw the number of active terms by inverting its CDF at one
//! uniform per sample, and draw the values of sample `s` from ChaCha stream
//! `s + 1` of a key taken from the caller's generator. Two calls handed
//! identically seeded generators are therefore coupled: they differ only on
//! samples where the two count distributions disagree at the same uniform.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};

use crate::math::{exp, ln_1p};
use crate::rng::Rng64;
use crate::{Error, Result};

fn poisson_quantile(lambda: f64, u: f64) -> usize {
    let mut p = exp(-lambda);
    let mut cdf = p;
    let mut q = 0usize;
    while u >= cdf && p > 0.0 {
        q += 1;
        p *= lambda / q as f64;
        cdf += p;
    }
    q
}

fn binomial_quantile(n: usize, theta: f64, u: f64) -> usize {
    let mut p = exp(n as f64 * ln_1p(-theta));
    let mut cdf = p;
    let odds = theta / (1.0 - theta);
    let mut q = 0usize;
    while u >= cdf && q < n && p > 0.0 {
        p *= (n - q) as f64 / (q + 1) as f64 * odds;
        q += 1;
        cdf += p;
    }
    q
}

fn compound_sample<R, F, Q>(quantile: Q, mut mu: F, count: usize, rng: &mut R) -> Vec<f64>
where
    R: Rng + ?Sized,
    F: FnMut(&mut Rng64) -> f64,
    Q: Fn(f64) -> usize,
{
    let key: [u8; 32] = rng.random();
    let mut counts = Rng64::from_seed(key);
    let mut values = Rng64::from_seed(key);
    (0..count)
        .map(|s| {
            let terms = quantile(counts.random::<f64>());
            if terms == 0 {
                return 0.0;
            }
            values.set_stream(s as u64 + 1);
            values.set_word_pos(0);
            (0..terms).map(|_| mu(&mut values)).sum()
        })
        .collect()
}

/// `count` draws from `exp(-p) sum_q p^q/q! mu_q`: a Poisson(`d_rho`)
/// number of iid `mu` draws, summed.
pub fn mixture_sample<R, F>(d_rho: f64, mu: F, count: usize, rng: &mut R) -> Result<Vec<f64>>
where
    R: Rng + ?Sized,
    F: FnMut(&mut Rng64) -> f64,
{
    if !(d_rho >= 0.0 && d_rho.is_finite()) {
        return Err(Error::InvalidParameter("d_rho must be non-negative"));
    }
    Ok(compound_sample(
        |u| poisson_quantile(d_rho, u),
        mu,
        count,
        rng,
    ))
}

/// `count` draws of `sum_{j<n} b_j x_j` with `b_j ~ Ber(p/n)` and
/// `x_j ~ mu`. The number of active terms is Binomial(n, p/n).
pub fn sparse_sum_sample<R, F>(
    n: usize,
    p: f64,
    mu: F,
    count: usize,
    rng: &mut R,
) -> Result<Vec<f64>>
where
    R: Rng + ?Sized,
    F: FnMut(&mut Rng64) -> f64,
{
    if n == 0 || !(p > 0.0 && p < n as f64) {
        return Err(Error::InvalidParameter("need 0 < p < n"));
    }
    let theta = p / n as f64;
    Ok(compound_sample(
        |u| binomial_quantile(n, theta, u),
        mu,
        count,
        rng,
    ))
}
