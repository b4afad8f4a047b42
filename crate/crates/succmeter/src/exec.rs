//! Data-parallel execution helpers.
//!
//! With the `parallel` feature (default) the indexed maps fan out over rayon;
//! without it they fall back to the sequential implementations below. Every
//! caller keeps its reduction order fixed (results are collected by index and
//! summed sequentially), so the outputs are bit-identical in both builds and
//! for any thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::Result;

/// Environment variable capping the rayon thread count.
pub const THREADS_ENV: &str = "SUCCMETER_THREADS";

/// Map `f` over `0..n`, collecting results in index order.
#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

/// Map `f` over `0..n`, collecting results in index order.
#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    map_indexed_seq(n, f)
}

/// Sequential fallback for [`map_indexed`]; always available so benchmarks
/// can compare both paths within one build.
pub fn map_indexed_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// Fallible variant of [`map_indexed`]: the first error wins.
#[cfg(feature = "parallel")]
pub fn try_map_indexed<T, F>(n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

/// Fallible variant of [`map_indexed`]: the first error wins.
#[cfg(not(feature = "parallel"))]
pub fn try_map_indexed<T, F>(n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    try_map_indexed_seq(n, f)
}

/// Sequential fallback for [`try_map_indexed`].
pub fn try_map_indexed_seq<T, F>(n: usize, f: F) -> Result<Vec<T>>
where
    F: Fn(usize) -> Result<T>,
{
    (0..n).map(f).collect()
}

/// Cap the global thread pool from `SUCCMETER_THREADS`, if set.
///
/// Returns the applied cap. A no-op when the variable is unset or malformed,
/// when the pool is already initialized, or in a sequential build.
pub fn configure_threads_from_env() -> Option<usize> {
    let n: usize = std::env::var(THREADS_ENV).ok()?.parse().ok()?;
    if n == 0 {
        return None;
    }
    #[cfg(feature = "parallel")]
    {
        // Ignore AlreadyInitialized: the first configuration wins.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Some(n)
}
