//! Data-parallel mapping with a sequential fallback.
//!
//! With the `parallel` feature (default) the heavy sweeps fan out over a
//! rayon pool; without it the same code runs sequentially. Results are
//! collected in input order either way, so downstream reductions are
//! deterministic regardless of scheduling.

#[cfg(feature = "parallel")]
pub(crate) fn map_collect<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_collect<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}
