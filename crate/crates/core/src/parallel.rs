//! Pointwise-over-k work runs serially unless a thread count above one is set.
//! Results are always collected in index order, so output does not depend on
//! the thread count.

use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

static THREADS: AtomicUsize = AtomicUsize::new(1);
static POOL: Mutex<Option<(usize, Arc<ThreadPool>)>> = Mutex::new(None);

pub fn set_threads(n: usize) {
    THREADS.store(n.max(1), Ordering::SeqCst);
}

pub fn threads() -> usize {
    THREADS.load(Ordering::SeqCst)
}

fn pool(n: usize) -> Arc<ThreadPool> {
    let mut guard = POOL.lock().unwrap_or_else(|e| e.into_inner());
    if let Some((m, p)) = guard.as_ref() {
        if *m == n {
            return p.clone();
        }
    }
    let p = Arc::new(
        ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool construction"),
    );
    *guard = Some((n, p.clone()));
    p
}

pub fn map<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    let n = threads();
    if n <= 1 || len < 2 {
        (0..len).map(f).collect()
    } else {
        pool(n).install(|| (0..len).into_par_iter().map(f).collect())
    }
}

pub fn try_map<T, E, F>(len: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync + Send,
{
    map(len, f).into_iter().collect()
}
