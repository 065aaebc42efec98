use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::model::ProblemInstance;
use crate::{Error, Result};

/// Pairs of sketch entries examined per instance; beyond `m(m-1)/2` this
/// many pairs are drawn uniformly with replacement instead.
pub const MAX_PAIRS_PER_INSTANCE: usize = 2_000_000;

/// Binned Monte-Carlo estimates of `p_z` and `p_e`.
///
/// `pz_hat[b]` is the fraction of sketch entries with noisy value in bin `b`
/// whose clean value is exactly zero; `pe_hat[b]` the fraction of entry pairs
/// with noisy difference in bin `b` whose clean values coincide. Empty bins
/// are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalPosterior {
    pub bin_edges: Vec<f64>,
    pub pz_hat: Vec<Option<f64>>,
    pub pe_hat: Vec<Option<f64>>,
    pub counts_z: Vec<u64>,
    pub counts_e: Vec<u64>,
}

impl EmpiricalPosterior {
    pub fn num_bins(&self) -> usize {
        self.bin_edges.len() - 1
    }

    pub fn bin_center(&self, b: usize) -> f64 {
        0.5 * (self.bin_edges[b] + self.bin_edges[b + 1])
    }
}

fn bin_of(edges: &[f64], v: f64) -> Option<usize> {
    if !(v >= edges[0] && v < edges[edges.len() - 1]) {
        return None;
    }
    Some(edges.partition_point(|&e| e <= v) - 1)
}

fn ratio(hits: &[u64], counts: &[u64]) -> Vec<Option<f64>> {
    hits.iter()
        .zip(counts)
        .map(|(&h, &c)| (c > 0).then(|| h as f64 / c as f64))
        .collect()
}

/// Estimates `p_z` and `p_e` from generated instances, using exact zero and
/// equality events on the clean sketch. Values outside the edges are dropped.
pub fn empirical_posteriors<R: Rng + ?Sized>(
    instances: &[ProblemInstance],
    bin_edges: &[f64],
    rng: &mut R,
) -> Result<EmpiricalPosterior> {
    if instances.is_empty() {
        return Err(Error::EmptyInput);
    }
    if bin_edges.len() < 2 || bin_edges.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter(
            "bin edges must be strictly increasing",
        ));
    }
    let first = &instances[0].params;
    let same = |p: &crate::model::GenParams| {
        (p.n, p.m, p.k, p.d, p.sigma_s, p.sigma_n)
            == (
                first.n,
                first.m,
                first.k,
                first.d,
                first.sigma_s,
                first.sigma_n,
            )
    };
    if !instances.iter().all(|inst| same(&inst.params)) {
        return Err(Error::InvalidParameter(
            "instances must share generation parameters",
        ));
    }
    let bins = bin_edges.len() - 1;
    let mut counts_z = vec![0u64; bins];
    let mut hits_z = vec![0u64; bins];
    let mut counts_e = vec![0u64; bins];
    let mut hits_e = vec![0u64; bins];

    for inst in instances {
        for (&clean, &noisy) in inst.y.iter().zip(&inst.yhat) {
            if let Some(b) = bin_of(bin_edges, noisy) {
                counts_z[b] += 1;
                hits_z[b] += (clean == 0.0) as u64;
            }
        }
        let m = inst.y.len();
        let mut visit = |i1: usize, i2: usize| {
            if let Some(b) = bin_of(bin_edges, inst.yhat[i1] - inst.yhat[i2]) {
                counts_e[b] += 1;
                hits_e[b] += (inst.y[i1] == inst.y[i2]) as u64;
            }
        };
        if m < 2 {
            continue;
        }
        let all_pairs = m * (m - 1) / 2;
        if all_pairs <= MAX_PAIRS_PER_INSTANCE {
            for i1 in 0..m {
                for i2 in i1 + 1..m {
                    visit(i1, i2);
                }
            }
        } else {
            for _ in 0..MAX_PAIRS_PER_INSTANCE {
                let a = rng.random_range(0..m);
                let mut b = rng.random_range(0..m - 1);
                if b >= a {
                    b += 1;
                }
                visit(a.min(b), a.max(b));
            }
        }
    }
    Ok(EmpiricalPosterior {
        bin_edges: bin_edges.to_vec(),
        pz_hat: ratio(&hits_z, &counts_z),
        pe_hat: ratio(&hits_e, &counts_e),
        counts_z,
        counts_e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generate_problem, GenParams};
    use crate::rng::seeded;

    fn edges(lo: f64, hi: f64, bins: usize) -> Vec<f64> {
        (0..=bins)
            .map(|i| lo + (hi - lo) * i as f64 / bins as f64)
            .collect()
    }

    fn instances(k: usize, sigma_n: f64, count: u64) -> Vec<ProblemInstance> {
        (0..count)
            .map(|s| {
                let gp = GenParams {
                    n: 600,
                    m: 200,
                    k,
                    d: 5,
                    sigma_s: 1.0,
                    sigma_n,
                    seed: s,
                };
                generate_problem(&gp, &mut seeded(s)).unwrap()
            })
            .collect()
    }

    #[test]
    fn noiseless_separates_zero_bin() {
        let inst = instances(20, 0.0, 3);
        let mut e = edges(-4.0, 4.0, 80);
        // a bin holding only exact zeros (nonzero |y| < 1e-12 has probability zero)
        e.insert(40, -1e-12);
        e[41] = 1e-12;
        let est = empirical_posteriors(&inst, &e, &mut seeded(0)).unwrap();
        let zero_bin = bin_of(&e, 0.0).unwrap();
        for b in 0..est.num_bins() {
            if let Some(p) = est.pz_hat[b] {
                assert_eq!(p, if b == zero_bin { 1.0 } else { 0.0 }, "bin {b}");
            }
        }
    }

    #[test]
    fn empty_support_is_all_zero() {
        let inst = instances(0, 0.01, 2);
        let est = empirical_posteriors(&inst, &edges(-0.1, 0.1, 20), &mut seeded(0)).unwrap();
        assert!(est.pz_hat.iter().flatten().all(|&p| p == 1.0));
        assert!(est.pe_hat.iter().flatten().all(|&p| p == 1.0));
        assert!(est.pz_hat.iter().any(|p| p.is_some()));
    }

    #[test]
    fn empty_bins_are_undefined() {
        let inst = instances(0, 0.01, 1);
        let est = empirical_posteriors(&inst, &edges(5.0, 6.0, 4), &mut seeded(0)).unwrap();
        assert!(est.pz_hat.iter().all(|p| p.is_none()));
        assert!(est.counts_z.iter().all(|&c| c == 0));
    }

    #[test]
    fn empty_input_rejected() {
        assert_eq!(
            empirical_posteriors(&[], &[0.0, 1.0], &mut seeded(0)),
            Err(Error::EmptyInput)
        );
    }
}
