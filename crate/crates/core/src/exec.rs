//! Data-parallel helpers.
//!
//! With the `parallel` feature the helpers fan out over the rayon pool;
//! without it (or after [`set_policy`] selects [`Policy::Sequential`]) they
//! run the identical closure on the calling thread. Results are always
//! collected in index order, so both paths produce bit-identical output.

use std::sync::atomic::{AtomicU8, Ordering};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Policy {
    Sequential,
    Parallel,
}

static POLICY: AtomicU8 = AtomicU8::new(1);

/// Select the execution policy for subsequent calls. `Parallel` silently
/// degrades to sequential when the crate is built without `parallel`.
pub fn set_policy(policy: Policy) {
    POLICY.store(
        match policy {
            Policy::Sequential => 0,
            Policy::Parallel => 1,
        },
        Ordering::Relaxed,
    );
    faer::set_global_parallelism(dense_parallelism());
}

/// Parallelism hint for dense linear algebra under the current policy.
pub fn dense_parallelism() -> faer::Parallelism<'static> {
    #[cfg(feature = "parallel")]
    if policy() == Policy::Parallel {
        return faer::Parallelism::Rayon(0);
    }
    faer::Parallelism::None
}

pub fn policy() -> Policy {
    if cfg!(feature = "parallel") && POLICY.load(Ordering::Relaxed) == 1 {
        Policy::Parallel
    } else {
        Policy::Sequential
    }
}

/// `(0..n).map(f).collect()`, possibly in parallel.
pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if policy() == Policy::Parallel {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    (0..n).map(f).collect()
}

/// Calls `f(chunk_index, chunk)` for each `chunk_len`-sized chunk of `data`.
pub fn for_each_chunk<T, F>(data: &mut [T], chunk_len: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    assert!(chunk_len > 0);
    #[cfg(feature = "parallel")]
    if policy() == Policy::Parallel {
        use rayon::prelude::*;
        data.par_chunks_mut(chunk_len)
            .enumerate()
            .for_each(|(i, c)| f(i, c));
        return;
    }
    data.chunks_mut(chunk_len)
        .enumerate()
        .for_each(|(i, c)| f(i, c));
}
