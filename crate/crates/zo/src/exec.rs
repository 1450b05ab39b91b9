//! Data-parallel execution with a sequential fallback.
//!
//! With the default `parallel` feature, `map_indexed` fans out over rayon;
//! without it, it degrades to the sequential loop. Callers assign RNG streams
//! by index and reduce results in index order, so both paths produce identical
//! output for a fixed seed.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Fixed Monte Carlo chunk size. Chunk boundaries depend only on the sample
/// count, never on the thread count.
pub const CHUNK: usize = 4096;

pub fn n_chunks(n: usize) -> usize {
    n.div_ceil(CHUNK)
}

pub fn chunk_len(n: usize, chunk: usize) -> usize {
    let start = chunk * CHUNK;
    CHUNK.min(n - start)
}

#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    map_indexed_seq(n, f)
}

/// Always-sequential variant, kept public so benches can compare the two paths.
pub fn map_indexed_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}
