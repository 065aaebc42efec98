//! Worker pools and the multi-threaded column executor.

use std::num::NonZeroUsize;
use std::ops::Range;

use rayon::prelude::*;
use robustl0_core::decode::{ColumnExecutor, Update};

/// Environment fallback for `--jobs`.
pub const JOBS_ENV: &str = "ROBUSTL0_JOBS";

/// Columns per task.
const CHUNK: usize = 1024;

/// Splits the column range into chunks run on the current rayon pool and
/// concatenates the results in column order, so output does not depend on
/// the worker count.
#[derive(Debug, Clone, Copy, Default)]
pub struct RayonExecutor;

impl ColumnExecutor for RayonExecutor {
    fn propose(
        &self,
        n: usize,
        work: &(dyn Fn(Range<usize>) -> Vec<Update> + Sync),
    ) -> Vec<Update> {
        let chunks: Vec<Range<usize>> = (0..n)
            .step_by(CHUNK)
            .map(|s| s..(s + CHUNK).min(n))
            .collect();
        let parts: Vec<Vec<Update>> = chunks.into_par_iter().map(|r| work(r)).collect();
        parts.concat()
    }
}

/// `--jobs` if given, else `ROBUSTL0_JOBS`, else the available parallelism.
pub fn resolve_jobs(flag: Option<usize>) -> Result<usize, String> {
    if let Some(j) = flag {
        return if j == 0 {
            Err("--jobs must be at least 1".into())
        } else {
            Ok(j)
        };
    }
    if let Ok(v) = std::env::var(JOBS_ENV) {
        return match v.trim().parse::<usize>() {
            Ok(j) if j > 0 => Ok(j),
            _ => Err(format!("{JOBS_ENV} must be a positive integer, got {v:?}")),
        };
    }
    Ok(std::thread::available_parallelism().map_or(1, NonZeroUsize::get))
}

pub fn build_pool(jobs: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("failed to start worker threads")
}

#[cfg(test)]
mod tests {
    use super::*;
    use robustl0_core::decode::Sequential;

    #[test]
    fn matches_sequential_order() {
        let work = |r: Range<usize>| {
            r.filter(|j| j % 3 == 0)
                .map(|j| (j, j as f64))
                .collect::<Vec<_>>()
        };
        let seq = Sequential.propose(5000, &work);
        for jobs in [1, 3] {
            let par = build_pool(jobs).install(|| RayonExecutor.propose(5000, &work));
            assert_eq!(par, seq);
        }
    }

    #[test]
    fn explicit_jobs_win() {
        assert_eq!(resolve_jobs(Some(3)), Ok(3));
        assert!(resolve_jobs(Some(0)).is_err());
    }
}
