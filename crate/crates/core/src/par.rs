//! Execution policy for the data-parallel hot loops (lattice enumeration and
//! Monte-Carlo trials).
//!
//! Every parallel entry point produces results in a fixed order, so output is
//! independent of the worker count. Without the `parallel` feature all
//! policies run sequentially.

/// How to run a batch of independent jobs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExecPolicy {
    Sequential,
    /// `threads: None` uses the global pool.
    Parallel { threads: Option<usize> },
}

impl Default for ExecPolicy {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            ExecPolicy::Parallel { threads: None }
        } else {
            ExecPolicy::Sequential
        }
    }
}

impl ExecPolicy {
    /// Policy for a requested thread count; `1` means sequential.
    pub fn with_threads(threads: Option<usize>) -> Self {
        match threads {
            Some(1) => ExecPolicy::Sequential,
            Some(0) | None => ExecPolicy::default(),
            Some(t) => ExecPolicy::Parallel { threads: Some(t) },
        }
    }

    pub fn is_parallel(&self) -> bool {
        cfg!(feature = "parallel") && matches!(self, ExecPolicy::Parallel { .. })
    }

    /// `(0..n).map(f).collect()`, possibly in parallel; the output order is
    /// always the index order.
    pub fn map_indexed<R, F>(&self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            match *self {
                ExecPolicy::Sequential => (0..n).map(f).collect(),
                ExecPolicy::Parallel { threads: None } => (0..n).into_par_iter().map(f).collect(),
                ExecPolicy::Parallel { threads: Some(t) } => {
                    match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
                        Ok(pool) => pool.install(|| (0..n).into_par_iter().map(&f).collect()),
                        Err(e) => {
                            log::warn!("could not build a {t}-thread pool ({e}); running sequentially");
                            (0..n).map(f).collect()
                        }
                    }
                }
            }
        }
        #[cfg(not(feature = "parallel"))]
        {
            (0..n).map(f).collect()
        }
    }
}

/// Size the global worker pool used by [`ExecPolicy::Parallel`] with
/// `threads: None`. Only the first call has an effect.
pub fn init_global_pool(threads: usize) {
    #[cfg(feature = "parallel")]
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
        log::debug!("global pool already initialized: {e}");
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
}
