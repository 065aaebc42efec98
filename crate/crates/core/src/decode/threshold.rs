use alloc::vec::Vec;

use crate::model::SparseSignal;

/// Indices of the `k` largest `|x_j|` among `support`, ascending. Ties keep
/// the lower index.
pub(crate) fn top_k(x: &[f64], support: &[usize], k: usize) -> Vec<usize> {
    if support.len() <= k {
        return support.to_vec();
    }
    let mut idx = support.to_vec();
    let order = |a: &usize, b: &usize| x[*b].abs().total_cmp(&x[*a].abs()).then(a.cmp(b));
    idx.select_nth_unstable_by(k, order);
    idx.truncate(k);
    idx.sort_unstable();
    idx
}

/// `H_k`: keeps the `k` largest-magnitude entries, lower index first on ties.
pub fn hard_threshold(x: &SparseSignal, k: usize) -> SparseSignal {
    if x.nnz() <= k {
        return x.clone();
    }
    let dense = x.to_dense();
    let keep = top_k(&dense, &x.support(), k);
    let mut out = SparseSignal::new(x.n());
    for j in keep {
        out.insert(j, dense[j]).expect("index within range");
    }
    out
}
