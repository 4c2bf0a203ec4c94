//! Deterministic chunked execution.
//!
//! Rows are split into contiguous chunks and chunk `k` goes to worker
//! `k mod W`. Each row is computed by the same pure function whatever the
//! worker count, so the output does not depend on `W`.

use std::num::NonZeroUsize;
use std::thread;

pub const THREADS_ENV: &str = "FASTVOL_THREADS";
const MIN_CHUNK: usize = 1024;

/// Worker count from `FASTVOL_THREADS`, or the available parallelism when the
/// variable is unset or not a positive integer.
pub fn default_workers() -> usize {
    env_workers().unwrap_or_else(|| thread::available_parallelism().map_or(1, NonZeroUsize::get))
}

/// Parsed value of `FASTVOL_THREADS`, if set to a positive integer.
pub fn env_workers() -> Option<usize> {
    std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()).filter(|&w| w > 0)
}

pub fn chunk_size(rows: usize, workers: usize) -> usize {
    MIN_CHUNK.max(rows.div_ceil(4 * workers.max(1)))
}

/// Writes `f(i)` into `out[i]` for every row.
pub(crate) fn fill<R, F>(out: &mut [R], workers: usize, f: F)
where
    R: Send,
    F: Fn(usize) -> R + Sync,
{
    let chunk = chunk_size(out.len(), workers);
    if workers <= 1 || out.len() <= chunk {
        out.iter_mut().enumerate().for_each(|(i, o)| *o = f(i));
        return;
    }
    let mut lanes: Vec<Vec<(usize, &mut [R])>> = (0..workers).map(|_| Vec::new()).collect();
    for (k, piece) in out.chunks_mut(chunk).enumerate() {
        lanes[k % workers].push((k * chunk, piece));
    }
    let f = &f;
    thread::scope(|scope| {
        for lane in lanes.into_iter().filter(|l| !l.is_empty()) {
            scope.spawn(move || {
                for (start, piece) in lane {
                    piece.iter_mut().enumerate().for_each(|(j, o)| *o = f(start + j));
                }
            });
        }
    });
}
