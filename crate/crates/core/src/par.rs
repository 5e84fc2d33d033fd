//! Data-parallel helpers. Sweeps go through [`map`], which runs on rayon when
//! the `parallel` feature is enabled and the process-wide mode is
//! [`Execution::Parallel`]; otherwise it is a plain sequential loop.

use std::sync::atomic::{AtomicU8, Ordering};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Parallel,
    Sequential,
}

static MODE: AtomicU8 = AtomicU8::new(0);

pub fn set_execution(mode: Execution) {
    MODE.store(matches!(mode, Execution::Sequential) as u8, Ordering::Relaxed);
}

/// The effective mode: `Sequential` whenever the `parallel` feature is off.
pub fn execution() -> Execution {
    if cfg!(feature = "parallel") && MODE.load(Ordering::Relaxed) == 0 {
        Execution::Parallel
    } else {
        Execution::Sequential
    }
}

/// Sizes the global worker pool. Has no effect once the pool has started or
/// when built without the `parallel` feature.
pub fn configure_threads(threads: usize) {
    #[cfg(feature = "parallel")]
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
}

/// Reads `FLAGFORGE_THREADS` and sizes the pool accordingly.
pub fn configure_from_env() {
    if let Some(n) = std::env::var("FLAGFORGE_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        if n > 0 {
            configure_threads(n);
        }
    }
}

/// Order-preserving map.
pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if execution() == Execution::Parallel {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}
