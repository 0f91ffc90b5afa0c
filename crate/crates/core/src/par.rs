//! Execution strategy for the data-parallel kernels.
//!
//! Every parallel reduction in the crate goes through [`map_range`] or
//! [`chunked_sum`], which split work into fixed-size pieces and combine the
//! partial results in index order. The sequential and parallel paths therefore
//! produce bit-identical floating point results, and runs are reproducible
//! regardless of thread scheduling.
//!
//! The `parallel` cargo feature (on by default) enables the rayon backend.
//! Without it, [`Exec::Parallel`] silently runs sequentially.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Fixed reduction chunk for amplitude-level sums.
pub const CHUNK: usize = 1 << 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// True when work will actually be distributed across threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }
}

/// Evaluate `f(0..n)` and collect the results in index order.
pub fn map_range<T, F>(exec: Exec, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() && n > 1 {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// Sum `f(i)` over `0..n` in fixed chunks of [`CHUNK`]; partials are added in order.
pub fn chunked_sum<F>(exec: Exec, n: usize, f: F) -> Complex64
where
    F: Fn(usize) -> Complex64 + Sync + Send,
{
    let n_chunks = n.div_ceil(CHUNK);
    let partials = map_range(exec, n_chunks, |c| {
        let start = c * CHUNK;
        let end = (start + CHUNK).min(n);
        let mut acc = Complex64::new(0.0, 0.0);
        for i in start..end {
            acc += f(i);
        }
        acc
    });
    partials.into_iter().sum()
}

/// Fill `out[i] = f(i)` in place, chunked like [`chunked_sum`].
pub fn fill<T, F>(exec: Exec, out: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() && out.len() > CHUNK {
        use rayon::prelude::*;
        out.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
            let base = c * CHUNK;
            for (k, slot) in chunk.iter_mut().enumerate() {
                *slot = f(base + k);
            }
        });
        return;
    }
    let _ = exec;
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = f(i);
    }
}
