use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::SparseSignal;
use crate::{Error, Result};

/// Binary `m x n` matrix with exactly `d` ones per column, stored as sorted
/// column supports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpanderMatrix {
    n: usize,
    m: usize,
    d: usize,
    // column-major, column j occupies rows[j*d..(j+1)*d]
    rows: Vec<u32>,
}

/// Row-major view: for every row, the columns that touch it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowAdjacency {
    offsets: Vec<usize>,
    cols: Vec<u32>,
}

impl RowAdjacency {
    pub fn row(&self, i: usize) -> &[u32] {
        &self.cols[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn num_rows(&self) -> usize {
        self.offsets.len() - 1
    }
}

fn check_dims(n: usize, m: usize, d: usize) -> Result<()> {
    if d == 0 || m == 0 || n == 0 {
        return Err(Error::InvalidDimensions("n, m and d must be positive"));
    }
    if d > m {
        return Err(Error::InvalidDimensions("d must not exceed m"));
    }
    if m >= n {
        return Err(Error::InvalidDimensions("m must be smaller than n"));
    }
    if m > u32::MAX as usize {
        return Err(Error::InvalidDimensions("m exceeds u32 range"));
    }
    Ok(())
}

/// Draws every column support uniformly from the `d`-subsets of `[0, m)`.
///
/// Uses a partial Fisher-Yates shuffle on a persistent permutation of the
/// rows, so each column costs `O(d)`.
pub fn generate_expander<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    d: usize,
    rng: &mut R,
) -> Result<ExpanderMatrix> {
    check_dims(n, m, d)?;
    let mut perm: Vec<u32> = (0..m as u32).collect();
    let mut rows = Vec::with_capacity(n * d);
    for _ in 0..n {
        for s in 0..d {
            let pick = rng.random_range(s..m);
            perm.swap(s, pick);
        }
        let start = rows.len();
        rows.extend_from_slice(&perm[..d]);
        rows[start..].sort_unstable();
    }
    Ok(ExpanderMatrix { n, m, d, rows })
}

impl ExpanderMatrix {
    /// Builds a matrix from explicit column supports. Supports are sorted;
    /// duplicates, out-of-range rows and wrong lengths are rejected.
    pub fn from_columns<C: AsRef<[usize]>>(m: usize, d: usize, columns: &[C]) -> Result<Self> {
        let n = columns.len();
        if d == 0 || d > m || n == 0 {
            return Err(Error::InvalidDimensions("need 0 < d <= m and n > 0"));
        }
        let mut rows = Vec::with_capacity(n * d);
        for col in columns {
            let col = col.as_ref();
            if col.len() != d {
                return Err(Error::InvalidDimensions(
                    "column support length differs from d",
                ));
            }
            let start = rows.len();
            for &r in col {
                if r >= m {
                    return Err(Error::InvalidDimensions("row index out of range"));
                }
                rows.push(r as u32);
            }
            let s = &mut rows[start..];
            s.sort_unstable();
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidDimensions("repeated row within a column"));
            }
        }
        Ok(Self { n, m, d, rows })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Sorted row indices of column `j`.
    #[inline]
    pub fn column(&self, j: usize) -> &[u32] {
        &self.rows[j * self.d..(j + 1) * self.d]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[u32]> + '_ {
        self.rows.chunks_exact(self.d)
    }

    pub fn row_adjacency(&self) -> RowAdjacency {
        let mut counts = vec![0usize; self.m + 1];
        for &r in &self.rows {
            counts[r as usize + 1] += 1;
        }
        for i in 0..self.m {
            counts[i + 1] += counts[i];
        }
        let offsets = counts.clone();
        let mut cursor = counts;
        let mut cols = vec![0u32; self.rows.len()];
        for (j, col) in self.columns().enumerate() {
            for &r in col {
                cols[cursor[r as usize]] = j as u32;
                cursor[r as usize] += 1;
            }
        }
        RowAdjacency { offsets, cols }
    }

    pub fn matvec(&self, x: &SparseSignal) -> Result<Vec<f64>> {
        if x.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.n(),
            });
        }
        let mut y = vec![0.0; self.m];
        for (j, v) in x.iter() {
            for &i in self.column(j) {
                y[i as usize] += v;
            }
        }
        Ok(y)
    }

    /// `out = y - A x` for a dense `x`, accumulating `A x` in column order.
    pub(crate) fn residual_dense(&self, y: &[f64], x: &[f64], support: &[usize], out: &mut [f64]) {
        out.fill(0.0);
        for &j in support {
            let v = x[j];
            for &i in self.column(j) {
                out[i as usize] += v;
            }
        }
        for (o, &yi) in out.iter_mut().zip(y) {
            *o = yi - *o;
        }
    }
}
