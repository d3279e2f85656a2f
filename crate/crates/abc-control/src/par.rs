//! Deterministic mode-level parallelism.
//!
//! `ABC_CONTROL_THREADS` caps the number of worker threads (absent or 1
//! means fully sequential). Each mode writes only its own slot, so the
//! result is bitwise independent of the thread count.

use std::sync::OnceLock;

use crate::error::Result;

pub(crate) fn thread_cap() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var("ABC_CONTROL_THREADS")
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
            .filter(|&n| n >= 1)
            .unwrap_or(1)
    })
}

/// Maps `f` over 0..n, optionally across threads, preserving order.
pub(crate) fn parallel_modes<T: Send>(
    n: usize,
    f: impl Fn(usize) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    let threads = thread_cap().min(n.max(1));
    if threads <= 1 || n <= 1 {
        return (0..n).map(f).collect();
    }
    let mut slots: Vec<Option<Result<T>>> = (0..n).map(|_| None).collect();
    let chunk = n.div_ceil(threads);
    std::thread::scope(|scope| {
        for (t, slice) in slots.chunks_mut(chunk).enumerate() {
            let f = &f;
            scope.spawn(move || {
                for (off, slot) in slice.iter_mut().enumerate() {
                    *slot = Some(f(t * chunk + off));
                }
            });
        }
    });
    slots.into_iter().map(|s| s.expect("worker filled every slot")).collect()
}
