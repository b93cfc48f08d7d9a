//! Replica-level data parallelism.
//!
//! With the `parallel` feature (default) replicas are mapped on the rayon
//! pool; without it the same closures run sequentially. Output order always
//! follows replica index, so every downstream reduction is independent of the
//! thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Evaluates `f(0..reps)` and returns the results in replica order.
pub fn map_replicas<T, F>(reps: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..reps).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_replicas_sequential(reps, f)
    }
}

/// Always-sequential variant, used as the baseline in benchmarks.
pub fn map_replicas_sequential<T, F>(reps: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..reps).map(f).collect()
}

/// Runs `f` on a pool of `threads` workers (`None` keeps the global pool).
/// Without the `parallel` feature the thread count is ignored.
pub fn with_threads<R, F>(threads: Option<usize>, f: F) -> crate::Result<R>
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    #[cfg(feature = "parallel")]
    {
        match threads {
            Some(n) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| crate::Error::Config(format!("thread pool: {e}")))?;
                Ok(pool.install(f))
            }
            None => Ok(f()),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        Ok(f())
    }
}

pub fn parallel_enabled() -> bool {
    cfg!(feature = "parallel")
}

/// Workers available to [`map_replicas`] in the current context.
pub fn current_threads() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_matches_sequential() {
        let a = map_replicas(1000, |i| i * i);
        let b = map_replicas_sequential(1000, |i| i * i);
        assert_eq!(a, b);
    }

    #[test]
    fn thread_count_does_not_change_output() {
        let f = || map_replicas(500, |i| (i as f64).sqrt());
        let one = with_threads(Some(1), f).unwrap();
        let two = with_threads(Some(2), f).unwrap();
        assert_eq!(one, two);
    }
}
