//! Data-parallel helpers.
//!
//! With the `parallel` feature the loops below fan out over rayon's pool,
//! otherwise they run on the calling thread. Both paths use the same
//! chunking and the same reduction order, so results are bit-identical
//! whichever path is compiled in and however many threads the pool has.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Block length used by the deterministic reductions.
const REDUCE_BLOCK: usize = 1024;

/// Calls `f(chunk_index, chunk)` for consecutive chunks of `chunk` elements.
pub fn for_each_chunk<T, F>(data: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    let chunk = chunk.max(1);
    if data.len() <= chunk {
        if !data.is_empty() {
            f(0, data);
        }
        return;
    }
    #[cfg(feature = "parallel")]
    data.par_chunks_mut(chunk)
        .enumerate()
        .for_each(|(i, c)| f(i, c));
    #[cfg(not(feature = "parallel"))]
    data.chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
}

/// Fills `out[i] = f(i)`.
pub fn fill<T, F>(out: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    for_each_chunk(out, REDUCE_BLOCK, |c, chunk| {
        let base = c * REDUCE_BLOCK;
        for (i, slot) in chunk.iter_mut().enumerate() {
            *slot = f(base + i);
        }
    });
}

/// Builds a vector of length `len` with entries `f(i)`.
pub fn collect<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send + Default + Clone,
    F: Fn(usize) -> T + Sync + Send,
{
    let mut out = vec![T::default(); len];
    fill(&mut out, f);
    out
}

fn block_partials<F>(len: usize, f: &F, combine: fn(f64, f64) -> f64, init: f64) -> Vec<f64>
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let blocks = len.div_ceil(REDUCE_BLOCK);
    let mut partials = vec![init; blocks];
    for_each_chunk(&mut partials, 1, |b, slot| {
        let start = b * REDUCE_BLOCK;
        let end = (start + REDUCE_BLOCK).min(len);
        let mut acc = init;
        for i in start..end {
            acc = combine(acc, f(i));
        }
        slot[0] = acc;
    });
    partials
}

/// Deterministic blocked sum of `f(0) + ... + f(len - 1)`.
pub fn sum<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    block_partials(len, &f, |a, b| a + b, 0.0)
        .into_iter()
        .fold(0.0, |a, b| a + b)
}

/// Maximum of `f(i)`; `-inf` for an empty range. NaN entries propagate.
pub fn max<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    fn nan_max(a: f64, b: f64) -> f64 {
        if a.is_nan() || b.is_nan() {
            f64::NAN
        } else {
            a.max(b)
        }
    }
    block_partials(len, &f, nan_max, f64::NEG_INFINITY)
        .into_iter()
        .fold(f64::NEG_INFINITY, nan_max)
}

/// Minimum of `f(i)`; `+inf` for an empty range.
pub fn min<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    -max(len, |i| -f(i))
}
