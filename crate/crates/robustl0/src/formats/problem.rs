use std::collections::BTreeMap;
use std::path::Path;

use robustl0_core::model::{ExpanderMatrix, GenParams, ProblemInstance, SparseSignal};
use serde::{Deserialize, Serialize};

use super::{read_json, write_json};
use crate::{Error, Result};

/// Serialized problem. `x` and `y` may be absent for sketches without ground
/// truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub d: usize,
    pub sigma_s: f64,
    pub sigma_n: f64,
    pub seed: u64,
    pub columns: Vec<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<BTreeMap<usize, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<Vec<f64>>,
    pub yhat: Vec<f64>,
}

/// A checked problem file.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemData {
    pub params: GenParams,
    pub matrix: ExpanderMatrix,
    pub x: Option<SparseSignal>,
    pub y: Option<Vec<f64>>,
    pub yhat: Vec<f64>,
}

impl ProblemData {
    /// The full instance, if ground truth is present.
    pub fn into_instance(self) -> Option<ProblemInstance> {
        let (x, y) = (self.x?, self.y?);
        Some(ProblemInstance {
            params: self.params,
            matrix: self.matrix,
            x,
            y,
            yhat: self.yhat,
        })
    }
}

impl From<&ProblemInstance> for ProblemFile {
    fn from(p: &ProblemInstance) -> Self {
        let g = &p.params;
        ProblemFile {
            n: g.n,
            m: g.m,
            k: g.k,
            d: g.d,
            sigma_s: g.sigma_s,
            sigma_n: g.sigma_n,
            seed: g.seed,
            columns: p.matrix.columns().map(<[u32]>::to_vec).collect(),
            x: Some(p.x.iter().collect()),
            y: Some(p.y.clone()),
            yhat: p.yhat.clone(),
        }
    }
}

impl ProblemFile {
    /// Structural checks plus `y == A x` up to accumulation order.
    pub fn check(self, path: &Path) -> Result<ProblemData> {
        let bad = |msg: &str| Error::format(path, msg);
        let params = GenParams {
            n: self.n,
            m: self.m,
            k: self.k,
            d: self.d,
            sigma_s: self.sigma_s,
            sigma_n: self.sigma_n,
            seed: self.seed,
        };
        params.validate()?;
        if self.columns.len() != self.n {
            return Err(bad("column count differs from n"));
        }
        let cols: Vec<Vec<usize>> = self
            .columns
            .iter()
            .map(|c| c.iter().map(|&i| i as usize).collect())
            .collect();
        let matrix = ExpanderMatrix::from_columns(self.m, self.d, &cols)?;
        if self.yhat.len() != self.m {
            return Err(bad("yhat length differs from m"));
        }
        let x = match self.x {
            Some(map) => {
                if map.len() > self.k {
                    return Err(bad("x has more than k nonzeros"));
                }
                if map.values().any(|&v| v == 0.0) {
                    return Err(bad("x stores an explicit zero"));
                }
                Some(SparseSignal::from_pairs(self.n, map)?)
            }
            None => None,
        };
        if let Some(y) = &self.y {
            if y.len() != self.m {
                return Err(bad("y length differs from m"));
            }
            if let Some(x) = &x {
                let ax = matrix.matvec(x)?;
                let scale = x.l1_norm() * self.d as f64;
                if y.iter()
                    .zip(&ax)
                    .any(|(a, b)| (a - b).abs() > 1e-12 * (1.0 + scale))
                {
                    return Err(bad("y differs from A x"));
                }
            }
            if self.sigma_n == 0.0 && y != &self.yhat {
                return Err(bad("sigma_n is zero but yhat differs from y"));
            }
        }
        Ok(ProblemData {
            params,
            matrix,
            x,
            y: self.y,
            yhat: self.yhat,
        })
    }
}

pub fn write_problem(path: &Path, problem: &ProblemInstance) -> Result<()> {
    write_json(path, &ProblemFile::from(problem))
}

pub fn read_problem(path: &Path) -> Result<ProblemData> {
    read_json::<ProblemFile>(path)?.check(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use robustl0_core::model::generate_problem;
    use robustl0_core::rng::seeded;

    #[test]
    fn round_trip_is_bit_identical() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.json");
        let params = GenParams {
            n: 300,
            m: 120,
            k: 15,
            d: 5,
            sigma_s: 1.0,
            sigma_n: 1e-3,
            seed: 9,
        };
        let p = generate_problem(&params, &mut seeded(9)).unwrap();
        write_problem(&path, &p).unwrap();
        let back = read_problem(&path).unwrap().into_instance().unwrap();
        assert_eq!(back, p);
        for (a, b) in back.yhat.iter().zip(&p.yhat) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        let path2 = dir.path().join("q.json");
        write_problem(&path2, &back).unwrap();
        assert_eq!(
            std::fs::read(&path).unwrap(),
            std::fs::read(&path2).unwrap()
        );
    }

    #[test]
    fn rejects_inconsistent_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.json");
        let params = GenParams {
            n: 50,
            m: 20,
            k: 3,
            d: 3,
            sigma_s: 1.0,
            sigma_n: 0.0,
            seed: 1,
        };
        let p = generate_problem(&params, &mut seeded(1)).unwrap();
        let mut file = ProblemFile::from(&p);
        file.y.as_mut().unwrap()[0] += 1.0;
        assert!(file.clone().check(&path).is_err());
        let mut file = ProblemFile::from(&p);
        file.columns[0] = vec![0, 0, 1];
        assert!(file.check(&path).is_err());
        let mut file = ProblemFile::from(&p);
        file.x = None;
        file.y = None;
        let data = file.check(&path).unwrap();
        assert!(data.x.is_none() && data.into_instance().is_none());
    }
}
