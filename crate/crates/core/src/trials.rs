//! Parallel trial execution with results kept in trial order.

use rayon::prelude::*;

use crate::error::{invalid, Result};

/// Runs `f(0..n)` on `workers` threads (rayon's default pool when `None`).
///
/// Output order is the trial order, so results never depend on scheduling.
pub fn run_trials<T, F>(workers: Option<usize>, n: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    match workers {
        None => Ok((0..n).into_par_iter().map(&f).collect()),
        Some(0) => Err(invalid("workers must be at least 1")),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| invalid(format!("thread pool: {e}")))?;
            Ok(pool.install(|| (0..n).into_par_iter().map(&f).collect()))
        }
    }
}

/// Like [`run_trials`] for fallible trials; the first error in trial order wins.
pub fn try_run_trials<T, F>(workers: Option<usize>, n: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    run_trials(workers, n, f)?.into_iter().collect()
}
