//! Data-parallel helpers with a sequential fallback.
//!
//! Every parallel entry point hands each work item its own [`RngStream`], so
//! results are identical whichever [`Execution`] mode runs them and however
//! rayon schedules the items. Without the `parallel` feature,
//! `Execution::Parallel` silently runs sequentially.

use crate::distribution::Lasso;
use crate::error::Result;
use crate::samplers::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether this mode actually runs on more than one thread in this build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// `(0..n).map(f)` under the chosen execution mode, preserving order.
pub fn map_indexed<T, F>(n: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec == Execution::Parallel {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// Fallible variant of [`map_indexed`]; the first error in index order wins.
pub fn try_map_indexed<T, F>(n: usize, exec: Execution, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    map_indexed(n, exec, f).into_iter().collect()
}

/// Draws per independently seeded block in [`sample_lasso`].
pub const SAMPLE_BLOCK: usize = 4096;

/// `n` inverse-CDF draws, generated in fixed blocks of [`SAMPLE_BLOCK`], block
/// `k` on stream `k` of `seed`. The output does not depend on `exec`.
pub fn sample_lasso(dist: &Lasso, n: usize, seed: u64, exec: Execution) -> Vec<f64> {
    let blocks = n.div_ceil(SAMPLE_BLOCK);
    let chunks = map_indexed(blocks, exec, |k| {
        let len = SAMPLE_BLOCK.min(n - k * SAMPLE_BLOCK);
        let mut rng = RngStream::with_stream(seed, k as u64);
        dist.sample_n(len, &mut rng)
    });
    chunks.concat()
}

/// Evaluates `f` at every point of `xs`.
pub fn eval_grid<F>(xs: &[f64], exec: Execution, f: F) -> Vec<f64>
where
    F: Fn(f64) -> f64 + Sync + Send,
{
    map_indexed(xs.len(), exec, |i| f(xs[i]))
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}
