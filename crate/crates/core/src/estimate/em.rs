use alloc::vec;
use alloc::vec::Vec;

use super::{EstimateFlag, EstimateMethod, EstimateResult};
use crate::math::{exp, ln, sqrt, PI};
use crate::{Error, Result};

/// Minimum number of sketch entries for a two-component fit.
pub const MIN_SAMPLES: usize = 100;
/// Weights and variances below this are treated as a collapsed component.
const COLLAPSE_FLOOR: f64 = 1e-12;
/// Variance ratio below which the two components are not distinguishable.
const SEPARATION_RATIO: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmConfig {
    pub max_iters: usize,
    /// Relative change of the log-likelihood that ends the iteration.
    pub tol: f64,
    /// Sparsity ratio used for the initial weight `exp(-d rho0)`.
    pub rho0: f64,
}

impl Default for EmConfig {
    fn default() -> Self {
        Self {
            max_iters: 200,
            tol: 1e-8,
            rho0: 0.05,
        }
    }
}

/// Zero-mean two-component Gaussian mixture, narrow component first.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureFit {
    /// Weight of the narrow component.
    pub gamma: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    /// Log-likelihood before the first and after every EM step.
    pub log_likelihood: Vec<f64>,
    pub converged: bool,
}

fn log_likelihood(data: &[f64], gamma: f64, v1: f64, v2: f64) -> f64 {
    let (c1, c2) = (
        ln(gamma) - 0.5 * ln(2.0 * PI * v1),
        ln(1.0 - gamma) - 0.5 * ln(2.0 * PI * v2),
    );
    data.iter()
        .map(|&x| {
            let a = c1 - x * x / (2.0 * v1);
            let b = c2 - x * x / (2.0 * v2);
            let hi = a.max(b);
            hi + ln(exp(a - hi) + exp(b - hi))
        })
        .sum()
}

/// EM for `gamma N(0, s1^2) + (1 - gamma) N(0, s2^2)`.
pub fn fit_zero_mean_mixture(
    data: &[f64],
    gamma: f64,
    sigma1: f64,
    sigma2: f64,
    max_iters: usize,
    tol: f64,
) -> Result<MixtureFit> {
    if data.len() < 2 {
        return Err(Error::EmptyInput);
    }
    let (mut g, mut v1, mut v2) = (gamma, sigma1 * sigma1, sigma2 * sigma2);
    let mut ll = vec![log_likelihood(data, g, v1, v2)];
    let mut converged = false;
    for _ in 0..max_iters {
        let (c1, c2) = (ln(g) - 0.5 * ln(v1), ln(1.0 - g) - 0.5 * ln(v2));
        let (mut w1, mut s1, mut s2) = (0.0, 0.0, 0.0);
        for &x in data {
            let a = c1 - x * x / (2.0 * v1);
            let b = c2 - x * x / (2.0 * v2);
            let r1 = 1.0 / (1.0 + exp(b - a));
            w1 += r1;
            s1 += r1 * x * x;
            s2 += (1.0 - r1) * x * x;
        }
        let total = data.len() as f64;
        let w2 = total - w1;
        if w1 / total < COLLAPSE_FLOOR || w2 / total < COLLAPSE_FLOOR {
            return Err(Error::Degenerate("mixture weight collapsed"));
        }
        g = w1 / total;
        v1 = s1 / w1;
        v2 = s2 / w2;
        if v1 < COLLAPSE_FLOOR || v2 < COLLAPSE_FLOOR {
            return Err(Error::Degenerate("mixture variance collapsed"));
        }
        if v1 > v2 {
            core::mem::swap(&mut v1, &mut v2);
            g = 1.0 - g;
        }
        let next = log_likelihood(data, g, v1, v2);
        let prev = *ll.last().unwrap();
        ll.push(next);
        if (next - prev).abs() <= tol * next.abs().max(1.0) {
            converged = true;
            break;
        }
    }
    Ok(MixtureFit {
        gamma: g,
        sigma1: sqrt(v1),
        sigma2: sqrt(v2),
        log_likelihood: ll,
        converged,
    })
}

/// Joint estimate of `(sigma_n, sigma_s, rho)` from a two-component fit:
/// `rho = -ln(gamma) / d`, `sigma_n = sigma1`,
/// `sigma2^2 = sigma_n^2 + sigma_s^2 tau / (1 - exp(-tau))` with `tau = d rho`.
pub fn em_estimate(
    yhat: &[f64],
    d: usize,
    config: &EmConfig,
) -> Result<(EstimateResult, MixtureFit)> {
    if yhat.len() < MIN_SAMPLES {
        return Err(Error::Degenerate("fewer than 100 sketch entries"));
    }
    if d == 0 {
        return Err(Error::InvalidParameter("d must be positive"));
    }
    let sd = sqrt(yhat.iter().map(|x| x * x).sum::<f64>() / yhat.len() as f64);
    if !(sd > 0.0) {
        return Err(Error::Degenerate("sketch is identically zero"));
    }
    let gamma0 = exp(-(d as f64) * config.rho0);
    let fit = fit_zero_mean_mixture(
        yhat,
        gamma0,
        0.5 * sd,
        2.0 * sd,
        config.max_iters,
        config.tol,
    )?;

    let mut flags = Vec::new();
    if !fit.converged {
        flags.push(EstimateFlag::NoConvergence);
    }
    let tau = -ln(fit.gamma);
    let separated = fit.sigma2 * fit.sigma2 >= SEPARATION_RATIO * fit.sigma1 * fit.sigma1;
    let (sigma_s_hat, rho_hat) = if separated && tau > 0.0 {
        let s2 = (fit.sigma2 * fit.sigma2 - fit.sigma1 * fit.sigma1) * (1.0 - exp(-tau)) / tau;
        let rho = tau / d as f64;
        (Some(sqrt(s2)), (rho > 0.0 && rho < 1.0).then_some(rho))
    } else {
        flags.push(EstimateFlag::SingleComponent);
        (None, None)
    };
    let iterations = fit.log_likelihood.len() - 1;
    let result = EstimateResult {
        method: EstimateMethod::Em,
        sigma_n_hat: fit.sigma1,
        sigma_s_hat,
        rho_hat,
        iterations,
        flags,
    };
    Ok((result, fit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generate_problem, GenParams};
    use crate::rng::seeded;
    use approx::assert_relative_eq;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn sparsity_from_weight() {
        let gamma = (-0.7f64).exp();
        assert_relative_eq!(-gamma.ln() / 7.0, 0.1, max_relative = 1e-14);
    }

    #[test]
    fn likelihood_never_decreases() {
        let gp = GenParams {
            n: 8192,
            m: 2457,
            k: 245,
            d: 7,
            sigma_s: 1.0,
            sigma_n: 1e-2,
            seed: 4,
        };
        let p = generate_problem(&gp, &mut seeded(4)).unwrap();
        let (_, fit) = em_estimate(&p.yhat, 7, &EmConfig::default()).unwrap();
        for w in fit.log_likelihood.windows(2) {
            assert!(
                w[1] >= w[0] - 1e-9 * w[0].abs().max(1.0),
                "{} -> {}",
                w[0],
                w[1]
            );
        }
        assert!(fit.sigma1 <= fit.sigma2);
    }

    #[test]
    fn forward_relation_reproduces_sigma2() {
        let gp = GenParams {
            n: 8192,
            m: 2457,
            k: 245,
            d: 7,
            sigma_s: 1.0,
            sigma_n: 1e-2,
            seed: 5,
        };
        let p = generate_problem(&gp, &mut seeded(5)).unwrap();
        let (est, fit) = em_estimate(&p.yhat, 7, &EmConfig::default()).unwrap();
        let tau = 7.0 * est.rho_hat.unwrap();
        let s = est.sigma_s_hat.unwrap();
        let sigma2 = (est.sigma_n_hat.powi(2) + s * s * tau / (1.0 - (-tau).exp())).sqrt();
        assert_relative_eq!(sigma2, fit.sigma2, max_relative = 1e-10);
    }

    #[test]
    fn single_gaussian_is_flagged_or_rejected() {
        let mut rng = seeded(6);
        let y: Vec<f64> = (0..5000)
            .map(|_| 0.01 * Distribution::<f64>::sample(&StandardNormal, &mut rng))
            .collect::<Vec<f64>>();
        match em_estimate(&y, 7, &EmConfig::default()) {
            Ok((est, _)) => {
                assert!(
                    est.flags.contains(&EstimateFlag::SingleComponent),
                    "{est:?}"
                );
                assert!(est.sigma_s_hat.is_none());
            }
            Err(e) => assert!(matches!(e, Error::Degenerate(_))),
        }
    }

    #[test]
    fn too_few_samples() {
        assert!(matches!(
            em_estimate(&[0.1; 99], 7, &EmConfig::default()),
            Err(Error::Degenerate(_))
        ));
    }
}
