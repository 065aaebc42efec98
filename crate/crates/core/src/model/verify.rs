use alloc::vec;
use alloc::vec::Vec;

use super::{ExpanderMatrix, SparseSignal};
use crate::{Error, Result};

const MAX_SUBSETS: u128 = 1_000_000;
const MAX_DISSOCIATED_SUPPORT: usize = 20;

fn binomial(n: usize, r: usize) -> u128 {
    let r = r.min(n - r.min(n));
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > MAX_SUBSETS {
            return MAX_SUBSETS + 1;
        }
    }
    acc
}

/// Brute-force check that every column set `S` with `|S| <= k` touches more
/// than `(1 - eps) d |S|` rows.
pub fn verify_expansion(matrix: &ExpanderMatrix, k: usize, eps: f64) -> Result<bool> {
    let n = matrix.n();
    let k = k.min(n);
    let total: u128 = (1..=k).map(|s| binomial(n, s)).sum();
    if total > MAX_SUBSETS {
        return Err(Error::TooLarge("more than 10^6 column subsets"));
    }
    let d = matrix.d() as f64;
    let mut hits = vec![0u32; matrix.m()];
    let mut union = 0usize;
    let mut subset: Vec<usize> = Vec::with_capacity(k);

    // depth-first over increasing index sequences, maintaining row multiplicities
    fn visit(
        matrix: &ExpanderMatrix,
        start: usize,
        k: usize,
        bound: f64,
        hits: &mut [u32],
        union: &mut usize,
        subset: &mut Vec<usize>,
    ) -> bool {
        for j in start..matrix.n() {
            for &r in matrix.column(j) {
                let h = &mut hits[r as usize];
                if *h == 0 {
                    *union += 1;
                }
                *h += 1;
            }
            subset.push(j);
            let ok = (*union as f64) > bound * subset.len() as f64
                && (subset.len() == k || visit(matrix, j + 1, k, bound, hits, union, subset));
            subset.pop();
            for &r in matrix.column(j) {
                let h = &mut hits[r as usize];
                *h -= 1;
                if *h == 0 {
                    *union -= 1;
                }
            }
            if !ok {
                return false;
            }
        }
        true
    }

    if k == 0 {
        return Ok(true);
    }
    Ok(visit(
        matrix,
        0,
        k,
        (1.0 - eps) * d,
        &mut hits,
        &mut union,
        &mut subset,
    ))
}

/// True iff all `2^|supp(x)|` subset sums are pairwise distinct.
pub fn is_dissociated(x: &SparseSignal) -> Result<bool> {
    let vals: Vec<f64> = x.iter().map(|(_, v)| v).collect();
    if vals.len() > MAX_DISSOCIATED_SUPPORT {
        return Err(Error::TooLarge("support larger than 20"));
    }
    let count = 1usize << vals.len();
    let mut sums = vec![0.0f64; count];
    for mask in 1..count {
        let low = mask.trailing_zeros() as usize;
        sums[mask] = sums[mask & (mask - 1)] + vals[low];
    }
    sums.sort_unstable_by(f64::total_cmp);
    Ok(sums.windows(2).all(|w| w[0] != w[1]))
}
