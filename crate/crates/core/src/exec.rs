//! Execution mode switch.  With the `parallel` feature the heavy loops run on
//! rayon; `Sequential` is always available and produces identical results
//! because every reduction is done in a fixed order.

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    #[default]
    Auto,
}

impl Exec {
    pub fn parallel_enabled(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Auto
    }
}

/// Ordered map: output order equals input order regardless of mode.
pub fn map_collect<T, R, F>(exec: Exec, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.parallel_enabled() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Sum of `f(i)` for `i in 0..n`, computed chunk-wise and reduced in order so
/// the result is bit-identical between modes.
pub fn chunked_sum<F>(exec: Exec, n: usize, chunk: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let chunk = chunk.max(1);
    let starts: Vec<usize> = (0..n).step_by(chunk).collect();
    let partial = map_collect(exec, &starts, |&s| {
        let mut acc = 0.0;
        for i in s..(s + chunk).min(n) {
            acc += f(i);
        }
        acc
    });
    partial.iter().sum()
}

/// Configure the global rayon pool.  Ignored without the feature or when the
/// pool is already built.
pub fn set_threads(n: usize) {
    #[cfg(feature = "parallel")]
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let _ = n;
}
