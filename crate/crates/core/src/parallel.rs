//! Data-parallel helpers. With the `parallel` feature, independent work items
//! (sweep grid points, measurement branches) are spread over a rayon pool;
//! without it the same code runs sequentially. Results are always collected in
//! input order, so output never depends on the number of threads.

/// Maps `f` over `items`, preserving order.
pub fn map_ordered<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.into_iter().map(f).collect()
    }
}

/// Runs `f` with at most `threads` workers. `None` keeps the global default
/// (one worker per core).
pub fn with_threads<R, F>(threads: Option<usize>, f: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    #[cfg(feature = "parallel")]
    {
        match threads {
            Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
                Ok(pool) => pool.install(f),
                Err(_) => f(),
            },
            None => f(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        f()
    }
}

/// Thread cap from the `SWITCH_THREADS` environment variable, if set to a
/// positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var("SWITCH_THREADS")
        .ok()?
        .trim()
        .parse()
        .ok()
        .filter(|&n: &usize| n > 0)
}
