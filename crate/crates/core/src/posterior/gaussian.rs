use alloc::vec::Vec;

use crate::math::{exp, ln, ln_factorial, sqrt, PI};
use crate::{Error, Result};

pub const DEFAULT_TRUNCATION: usize = 30;
/// Auto-raise the truncation order until the lumped tail mass, relative to
/// the full series, falls below this.
const TAIL_MASS_TOL: f64 = 1e-12;
/// Below `exp(-UNDERFLOW_EXP)` a probability is zero in `f64`.
const UNDERFLOW_EXP: f64 = 746.0;

/// Density of `N(0, variance)` at `omega`.
pub fn gaussian_pdf(omega: f64, variance: f64) -> Result<f64> {
    if !(variance > 0.0) {
        return Err(Error::NonPositiveVariance);
    }
    Ok(exp(-omega * omega / (2.0 * variance)) / sqrt(2.0 * PI * variance))
}

/// `sum_{q >= first} x^q / q!`, summed directly so that tiny tails keep
/// full relative precision.
pub fn series_tail(first: usize, x: f64) -> f64 {
    if x == 0.0 {
        return if first == 0 { 1.0 } else { 0.0 };
    }
    let mut term = exp(first as f64 * ln(x) - ln_factorial(first));
    let mut sum = 0.0;
    let mut q = first;
    loop {
        sum += term;
        q += 1;
        term *= x / q as f64;
        if term <= sum * 1e-18 || term == 0.0 {
            return sum;
        }
    }
}

/// `exp(d rho) - sum_{q <= ell} (d rho)^q / q!`.
pub fn remainder_z(ell: usize, d_rho: f64) -> f64 {
    series_tail(ell + 1, d_rho)
}

/// `exp(2 d rho) - sum_{q <= ell} (2 d rho)^q / q!`.
pub fn remainder_e(ell: usize, d_rho: f64) -> f64 {
    series_tail(ell + 1, 2.0 * d_rho)
}

/// `p(omega) = 1 / (1 + sum_q exp(a_q + omega^2 b_q))`: every denominator
/// term divided by the numerator density.
#[derive(Debug, Clone, PartialEq)]
struct RatioSeries {
    a: Vec<f64>,
    b: Vec<f64>,
    tail_variance: f64,
    tail_weight: f64,
}

impl RatioSeries {
    /// Weights `lambda^q / q!`, variances `q s2 + v0` for `q = 1..=ell`, plus
    /// the lumped tail `R(ell) * phi(. | tail_variance)`.
    fn new(lambda: f64, s2: f64, v0: f64, ell: usize) -> Self {
        let mut a = Vec::with_capacity(ell + 1);
        let mut b = Vec::with_capacity(ell + 1);
        let mut push = |ln_w: f64, v: f64| {
            if ln_w.is_finite() {
                a.push(ln_w + 0.5 * ln(v0 / v));
                b.push(0.5 * (1.0 / v0 - 1.0 / v));
            }
        };
        for q in 1..=ell {
            let v = q as f64 * s2 + v0;
            push(q as f64 * ln(lambda) - ln_factorial(q), v);
        }
        let tail_weight = series_tail(ell + 1, lambda);
        // variance of the lumped tail: the weighted mean of q s2 + v0 over q > ell
        let tail_variance = if tail_weight > 0.0 {
            (s2 * lambda * series_tail(ell, lambda) + v0 * tail_weight) / tail_weight
        } else {
            f64::NAN
        };
        if tail_weight > 0.0 {
            push(ln(tail_weight), tail_variance);
        }
        Self {
            a,
            b,
            tail_variance,
            tail_weight,
        }
    }

    fn eval(&self, omega: f64) -> f64 {
        let w2 = omega * omega;
        let mut max = f64::NEG_INFINITY;
        for (a, b) in self.a.iter().zip(&self.b) {
            max = max.max(a + w2 * b);
        }
        if max > UNDERFLOW_EXP {
            return 0.0;
        }
        if max < 700.0 {
            let s: f64 = self
                .a
                .iter()
                .zip(&self.b)
                .map(|(a, b)| exp(a + w2 * b))
                .sum();
            return 1.0 / (1.0 + s);
        }
        let s: f64 = self
            .a
            .iter()
            .zip(&self.b)
            .map(|(a, b)| exp(a + w2 * b - max))
            .sum::<f64>()
            + exp(-max);
        exp(-(max + ln(s)))
    }
}

/// Closed-form `p_z`, `p_e` for `N(0, sigma_s^2)` signals and
/// `N(0, sigma_n^2)` noise, with the Poisson series truncated at `ell` and
/// the remainder lumped into a single Gaussian of matched variance.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianPosterior {
    sigma_s: f64,
    sigma_n: f64,
    d: usize,
    rho: f64,
    ell: usize,
    zero: RatioSeries,
    equal: RatioSeries,
    peak_pz: f64,
    peak_pe: f64,
}

impl GaussianPosterior {
    /// Truncation starts at [`DEFAULT_TRUNCATION`] and is raised until the
    /// lumped tail carries less than `1e-12` of the series mass.
    pub fn new(sigma_s: f64, sigma_n: f64, d: usize, rho: f64) -> Result<Self> {
        Self::check(sigma_s, sigma_n, d, rho)?;
        let d_rho = d as f64 * rho;
        let mut ell = DEFAULT_TRUNCATION;
        while remainder_z(ell, d_rho) / exp(d_rho) >= TAIL_MASS_TOL
            || remainder_e(ell, d_rho) / exp(2.0 * d_rho) >= TAIL_MASS_TOL
        {
            ell += 1;
        }
        Self::with_truncation(sigma_s, sigma_n, d, rho, ell)
    }

    /// Uses exactly `ell` explicit terms.
    pub fn with_truncation(
        sigma_s: f64,
        sigma_n: f64,
        d: usize,
        rho: f64,
        ell: usize,
    ) -> Result<Self> {
        Self::check(sigma_s, sigma_n, d, rho)?;
        let d_rho = d as f64 * rho;
        let s2 = sigma_s * sigma_s;
        let n2 = sigma_n * sigma_n;
        let zero = RatioSeries::new(d_rho, s2, n2, ell);
        let equal = RatioSeries::new(2.0 * d_rho, s2, 2.0 * n2, ell);
        let peak_pz = zero.eval(0.0);
        let peak_pe = equal.eval(0.0);
        Ok(Self {
            sigma_s,
            sigma_n,
            d,
            rho,
            ell,
            zero,
            equal,
            peak_pz,
            peak_pe,
        })
    }

    fn check(sigma_s: f64, sigma_n: f64, d: usize, rho: f64) -> Result<()> {
        if !(sigma_s > 0.0 && sigma_s.is_finite()) {
            return Err(Error::InvalidParameter("sigma_s must be positive"));
        }
        if sigma_n == 0.0 {
            return Err(Error::DegenerateNoise);
        }
        if !(sigma_n > 0.0 && sigma_n.is_finite()) {
            return Err(Error::InvalidParameter("sigma_n must be non-negative"));
        }
        if d == 0 {
            return Err(Error::InvalidParameter("d must be positive"));
        }
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::InvalidParameter("rho must lie in (0, 1)"));
        }
        Ok(())
    }

    /// Same noise and signal levels with a different sparsity ratio.
    pub fn with_rho(&self, rho: f64) -> Result<Self> {
        Self::new(self.sigma_s, self.sigma_n, self.d, rho)
    }

    pub fn sigma_s(&self) -> f64 {
        self.sigma_s
    }

    pub fn sigma_n(&self) -> f64 {
        self.sigma_n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn peak_pz(&self) -> f64 {
        self.peak_pz
    }

    pub fn peak_pe(&self) -> f64 {
        self.peak_pe
    }

    /// Variance of the lumped `p_z` tail Gaussian.
    pub fn tail_variance_z(&self) -> f64 {
        self.zero.tail_variance
    }

    /// Variance of the lumped `p_e` tail Gaussian.
    pub fn tail_variance_e(&self) -> f64 {
        self.equal.tail_variance
    }

    pub fn tail_weight_z(&self) -> f64 {
        self.zero.tail_weight
    }

    pub fn tail_weight_e(&self) -> f64 {
        self.equal.tail_weight
    }

    /// Probability that the clean entry is zero given the noisy value `omega`.
    pub fn pz(&self, omega: f64) -> f64 {
        self.zero.eval(omega)
    }

    /// Probability that two clean entries are equal given their noisy
    /// difference `omega`.
    pub fn pe(&self, omega: f64) -> f64 {
        self.equal.eval(omega)
    }

    pub fn pz_scaled(&self, omega: f64) -> f64 {
        self.pz(omega) / self.peak_pz
    }

    pub fn pe_scaled(&self, omega: f64) -> f64 {
        self.pe(omega) / self.peak_pe
    }
}
