//! Ordered parallel map over independent tasks on a pool capped by
//! `NEWTON_DECAY_THREADS`.

use rayon::prelude::*;

pub const THREADS_ENV: &str = "NEWTON_DECAY_THREADS";

/// The cap from the environment; unset, empty, zero or garbage means no cap.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}

pub struct Pool {
    pool: rayon::ThreadPool,
}

impl Pool {
    pub fn from_env() -> Self {
        Self::with_threads(thread_cap())
    }

    pub fn with_threads(threads: Option<usize>) -> Self {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = threads {
            b = b.num_threads(n);
        }
        Pool { pool: b.build().expect("thread pool construction") }
    }

    /// `items.map(f)` with results in input order.
    pub fn map<T: Sync, R: Send>(&self, items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
        self.pool.install(|| items.par_iter().map(f).collect())
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}
