use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{generate_expander, ExpanderMatrix, SparseSignal};
use crate::{Error, Result};

/// Parameters of the generative model with Gaussian signal and noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenParams {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub d: usize,
    pub sigma_s: f64,
    pub sigma_n: f64,
    pub seed: u64,
}

impl GenParams {
    /// `m = floor(delta * n)`, `k = floor(rho * m)`.
    pub fn from_ratios(
        n: usize,
        delta: f64,
        rho: f64,
        d: usize,
        sigma_s: f64,
        sigma_n: f64,
        seed: u64,
    ) -> Self {
        let m = crate::math::floor(delta * n as f64) as usize;
        let k = crate::math::floor(rho * m as f64) as usize;
        Self {
            n,
            m,
            k,
            d,
            sigma_s,
            sigma_n,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 || self.d == 0 {
            return Err(Error::InvalidDimensions("n, m and d must be positive"));
        }
        if !(self.k < self.m && self.m < self.n) {
            return Err(Error::InvalidDimensions("need k < m < n"));
        }
        if self.d > self.m {
            return Err(Error::InvalidDimensions("d must not exceed m"));
        }
        if !(self.sigma_s > 0.0 && self.sigma_s.is_finite()) {
            return Err(Error::InvalidParameter("sigma_s must be positive"));
        }
        if !(self.sigma_n >= 0.0 && self.sigma_n.is_finite()) {
            return Err(Error::InvalidParameter("sigma_n must be non-negative"));
        }
        Ok(())
    }

    pub fn delta(&self) -> f64 {
        self.m as f64 / self.n as f64
    }

    pub fn rho(&self) -> f64 {
        self.k as f64 / self.m as f64
    }
}

/// One draw `(A, x, y, yhat)` from the generative model.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    pub params: GenParams,
    pub matrix: ExpanderMatrix,
    pub x: SparseSignal,
    pub y: Vec<f64>,
    pub yhat: Vec<f64>,
}

impl ProblemInstance {
    /// The noise realization `yhat - y`.
    pub fn noise(&self) -> Vec<f64> {
        self.yhat.iter().zip(&self.y).map(|(a, b)| a - b).collect()
    }

    pub fn noise_l1(&self) -> f64 {
        self.yhat
            .iter()
            .zip(&self.y)
            .map(|(a, b)| (a - b).abs())
            .sum()
    }
}

/// Samples `k` distinct indices from `[0, n)` (Floyd's algorithm), sorted.
fn sample_support<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Vec<usize> {
    let mut chosen = alloc::collections::BTreeSet::new();
    for j in (n - k)..n {
        let t = rng.random_range(0..=j);
        if !chosen.insert(t) {
            chosen.insert(j);
        }
    }
    chosen.into_iter().collect()
}

fn nonzero_normal<R: Rng + ?Sized>(sd: f64, rng: &mut R) -> f64 {
    loop {
        let z: f64 = StandardNormal.sample(rng);
        let v = sd * z;
        if v != 0.0 {
            return v;
        }
    }
}

/// Draws a full instance. The matrix, support, values and noise are drawn
/// from `rng` in that order; `params.seed` is recorded but not consumed.
pub fn generate_problem<R: Rng + ?Sized>(
    params: &GenParams,
    rng: &mut R,
) -> Result<ProblemInstance> {
    params.validate()?;
    let matrix = generate_expander(params.n, params.m, params.d, rng)?;
    let support = sample_support(params.n, params.k, rng);
    let mut x = SparseSignal::new(params.n);
    for j in support {
        x.insert(j, nonzero_normal(params.sigma_s, rng))?;
    }
    let y = matrix.matvec(&x)?;
    let yhat = if params.sigma_n > 0.0 {
        y.iter()
            .map(|&v| {
                let z: f64 = StandardNormal.sample(rng);
                v + params.sigma_n * z
            })
            .collect()
    } else {
        y.clone()
    };
    Ok(ProblemInstance {
        params: *params,
        matrix,
        x,
        y,
        yhat,
    })
}
