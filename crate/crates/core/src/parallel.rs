//! Order-preserving fan-out over a fixed number of worker threads.

use rayon::prelude::*;

/// Maps `f` over `items` on `workers` threads (1 or 0 = the calling thread).
///
/// Results keep input order. On failure, the error of the earliest failing
/// item is returned, regardless of which worker hit it first.
pub fn parallel_map<T, U, E, F>(items: &[T], workers: usize, f: F) -> Result<Vec<U>, E>
where
    T: Sync,
    U: Send,
    E: Send,
    F: Fn(&T) -> Result<U, E> + Sync,
{
    let results: Vec<Result<U, E>> = if workers <= 1 || items.len() <= 1 {
        items.iter().map(&f).collect()
    } else {
        match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
            Ok(pool) => pool.install(|| items.par_iter().map(&f).collect()),
            Err(_) => items.iter().map(&f).collect(),
        }
    };
    results.into_iter().collect()
}
