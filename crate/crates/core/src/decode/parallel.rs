use alloc::vec;
use alloc::vec::Vec;

use super::{l1, DecodeReport};
use crate::model::{ExpanderMatrix, SparseSignal};
use crate::{Error, Result};

/// Relative tolerance for "equal" and "zero" residual values, scaled by
/// `max |y_i|`. Rows that had other columns subtracted carry rounding residue.
pub const EQUALITY_TOL: f64 = 1e-12;

/// Parallel-l0 on a noiseless sketch.
///
/// Each sweep scores every column against one residual snapshot: for a row
/// `i` of column `j` with `r_i != 0`, `n_e` counts rows of `j` equal to
/// `r_i` and `n_z` rows equal to zero; `n_e - n_z >= alpha` proposes
/// `x_j += r_i` (the last passing row wins). After the sweep
/// `r = y - A xhat` is recomputed. Stops on a zero residual, after
/// `max_iters` sweeps, or when a sweep proposes nothing.
///
/// "Equal" and "zero" are tested to within [`EQUALITY_TOL`]` * max|y|`; the
/// proposed value is an exact value from the matching rows, taken from an
/// untouched row when there is one.
pub fn parallel_l0(
    matrix: &ExpanderMatrix,
    y: &[f64],
    alpha: f64,
    max_iters: usize,
) -> Result<DecodeReport> {
    let (n, m) = (matrix.n(), matrix.m());
    if y.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: y.len(),
        });
    }
    if !(alpha > 1.0 && alpha <= matrix.d() as f64) {
        return Err(Error::InvalidParameter("alpha must lie in (1, d]"));
    }
    let mut x = vec![0.0; n];
    let mut support: Vec<usize> = Vec::new();
    let mut r = y.to_vec();
    let mut trace = vec![l1(&r)];
    let mut iterations = 0;
    let tol = EQUALITY_TOL * y.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let is_zero = |v: f64| v.abs() <= tol;
    let mut converged = r.iter().all(|&v| is_zero(v));

    while !converged && iterations < max_iters {
        iterations += 1;
        let mut updates: Vec<(usize, f64)> = Vec::new();
        for j in 0..n {
            let col = matrix.column(j);
            let n_z = col.iter().filter(|&&l| is_zero(r[l as usize])).count() as f64;
            let mut u = None;
            for &i in col {
                let ri = r[i as usize];
                if is_zero(ri) {
                    continue;
                }
                let n_e = col
                    .iter()
                    .filter(|&&l| (r[l as usize] - ri).abs() <= tol)
                    .count() as f64;
                if n_e - n_z >= alpha {
                    u = Some(modal_match(col, &r, y, ri, tol));
                }
            }
            if let Some(v) = u {
                updates.push((j, v));
            }
        }
        if updates.is_empty() {
            break;
        }
        for (j, v) in updates {
            x[j] += v;
        }
        support = (0..n).filter(|&j| x[j] != 0.0).collect();
        matrix.residual_dense(y, &x, &support, &mut r);
        trace.push(l1(&r));
        converged = r.iter().all(|&v| is_zero(v));
    }
    let xhat = SparseSignal::from_pairs(n, support.iter().map(|&j| (j, x[j])))?;
    Ok(DecodeReport {
        xhat,
        iterations,
        residual_l1_trace: trace,
        converged,
        wall_ms: 0.0,
        final_t: 1.0,
    })
}

/// Exact value among the rows of `col` within `tol` of `target`, preferring
/// values read from rows no other column has touched (`r_i == y_i`), then
/// the most frequent.
fn modal_match(col: &[u32], r: &[f64], y: &[f64], target: f64, tol: f64) -> f64 {
    let mut best = ((0usize, 0usize), target);
    for &a in col {
        let va = r[a as usize];
        if (va - target).abs() > tol {
            continue;
        }
        let same = col.iter().filter(|&&b| r[b as usize] == va);
        let untouched = same.clone().filter(|&&b| y[b as usize] == va).count();
        let score = (untouched, same.count());
        if score > best.0 {
            best = (score, va);
        }
    }
    best.1
}
