use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// A sparse vector in `R^n`. Only nonzero values are stored.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseSignal {
    n: usize,
    entries: BTreeMap<usize, f64>,
}

impl SparseSignal {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            entries: BTreeMap::new(),
        }
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, f64)>>(n: usize, pairs: I) -> Result<Self> {
        let mut s = Self::new(n);
        for (j, v) in pairs {
            s.insert(j, v)?;
        }
        Ok(s)
    }

    /// Keeps the nonzero entries of a dense vector.
    pub fn from_dense(x: &[f64]) -> Self {
        let entries = x
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(j, &v)| (j, v))
            .collect();
        Self {
            n: x.len(),
            entries,
        }
    }

    /// Sets `x_j = value`; a zero value removes the entry.
    pub fn insert(&mut self, j: usize, value: f64) -> Result<()> {
        if j >= self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: j,
            });
        }
        if value == 0.0 {
            self.entries.remove(&j);
        } else {
            self.entries.insert(j, value);
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, j: usize) -> f64 {
        self.entries.get(&j).copied().unwrap_or(0.0)
    }

    /// `(index, value)` pairs in ascending index order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().map(|(&j, &v)| (j, v))
    }

    pub fn support(&self) -> Vec<usize> {
        self.entries.keys().copied().collect()
    }

    pub fn l1_norm(&self) -> f64 {
        self.entries.values().map(|v| v.abs()).sum()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        for (j, v) in self.iter() {
            x[j] = v;
        }
        x
    }

    /// `||self - other||_1` over the union of supports.
    pub fn l1_distance(&self, other: &SparseSignal) -> f64 {
        let mut total = 0.0;
        for (j, v) in self.iter() {
            total += (v - other.get(j)).abs();
        }
        for (j, v) in other.iter() {
            if !self.entries.contains_key(&j) {
                total += v.abs();
            }
        }
        total
    }
}
