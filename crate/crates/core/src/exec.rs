//! Execution-mode plumbing: data-parallel work with a sequential fallback.
//!
//! Hot loops (Farey scans, cloud streaming) take an [`ExecMode`] and split
//! their work into independent chunks. With the `parallel` feature the chunks
//! run on the current rayon pool; without it (or with
//! [`ExecMode::Sequential`]) they run in order on the calling thread. Chunk
//! results are merged in chunk order, so output never depends on the worker
//! count.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for ExecMode {
    #[cfg(feature = "parallel")]
    fn default() -> Self {
        ExecMode::Parallel
    }
    #[cfg(not(feature = "parallel"))]
    fn default() -> Self {
        ExecMode::Sequential
    }
}

/// Map `items` and collect results in input order.
pub fn map_collect<T, U, F>(mode: ExecMode, items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    match mode {
        ExecMode::Sequential => items.into_iter().map(f).collect(),
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => {
            use rayon::prelude::*;
            items.into_par_iter().map(f).collect()
        }
    }
}

/// Map `items` and fold the results with an associative `merge`.
///
/// The merge is applied left to right over the chunk results, so it must be
/// associative for determinism (commutativity is not required).
pub fn map_reduce<T, U, F, M>(mode: ExecMode, items: Vec<T>, f: F, identity: U, merge: M) -> U
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
    M: Fn(U, U) -> U + Sync + Send,
{
    match mode {
        ExecMode::Sequential => items.into_iter().map(f).fold(identity, merge),
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => {
            let parts: Vec<U> = map_collect(mode, items, f);
            parts.into_iter().fold(identity, merge)
        }
    }
}
