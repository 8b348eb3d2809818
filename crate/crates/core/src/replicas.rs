//! Replica fan-out for Monte Carlo studies.
//!
//! Results are always returned in replica order, so any reduction over them
//! is independent of how the work was scheduled. With the `parallel` feature
//! the default entry points use rayon; without it they run sequentially.

use crate::rng::{replica_stream, Stream};

/// Evaluate `f(replica, stream)` for `0..trials` on the current thread.
pub fn map_replicas_sequential<T, F>(seed: u64, trials: u64, f: F) -> Vec<T>
where
    F: Fn(u64, &mut Stream) -> T,
{
    (0..trials)
        .map(|i| f(i, &mut replica_stream(seed, i)))
        .collect()
}

#[cfg(feature = "parallel")]
pub fn map_replicas_parallel<T, F>(seed: u64, trials: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut Stream) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..trials)
        .into_par_iter()
        .map(|i| f(i, &mut replica_stream(seed, i)))
        .collect()
}

/// Evaluate `f` once per replica, in parallel when available.
pub fn map_replicas<T, F>(seed: u64, trials: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut Stream) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        map_replicas_parallel(seed, trials, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_replicas_sequential(seed, trials, f)
    }
}

/// Number of replicas for which `event` holds.
pub fn count_replicas<F>(seed: u64, trials: u64, event: F) -> u64
where
    F: Fn(u64, &mut Stream) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..trials)
            .into_par_iter()
            .filter(|&i| event(i, &mut replica_stream(seed, i)))
            .count() as u64
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..trials)
            .filter(|&i| event(i, &mut replica_stream(seed, i)))
            .count() as u64
    }
}
