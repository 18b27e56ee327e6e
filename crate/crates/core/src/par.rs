//! Data-parallel dispatch.
//!
//! Every batch loop in the crate (convolution rows, identity verification,
//! table rows, congruence sweeps) goes through [`map`] / [`map_range`]. With
//! the `parallel` feature these run on the rayon pool; without it, or when
//! [`set_mode`] selects [`Mode::Sequential`], they run on the calling thread.
//! Results are always returned in input order, so output is identical in
//! both modes.

use std::sync::atomic::{AtomicBool, Ordering};

static FORCE_SEQUENTIAL: AtomicBool = AtomicBool::new(false);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Sequential,
    Parallel,
}

/// Selects the execution mode for subsequent batch loops (process-wide).
pub fn set_mode(mode: Mode) {
    FORCE_SEQUENTIAL.store(mode == Mode::Sequential, Ordering::SeqCst);
}

/// The effective mode. Always `Sequential` when built without `parallel`.
pub fn mode() -> Mode {
    if cfg!(feature = "parallel") && !FORCE_SEQUENTIAL.load(Ordering::SeqCst) {
        Mode::Parallel
    } else {
        Mode::Sequential
    }
}

/// Runs `f` with the given mode, restoring the previous one afterwards.
pub fn with_mode<R>(mode: Mode, f: impl FnOnce() -> R) -> R {
    let prev = FORCE_SEQUENTIAL.swap(mode == Mode::Sequential, Ordering::SeqCst);
    let out = f();
    FORCE_SEQUENTIAL.store(prev, Ordering::SeqCst);
    out
}

#[cfg(feature = "parallel")]
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    match mode() {
        Mode::Parallel => items.par_iter().map(f).collect(),
        Mode::Sequential => items.iter().map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map_range<R, F>(range: std::ops::Range<usize>, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    use rayon::prelude::*;
    match mode() {
        Mode::Parallel => range.into_par_iter().map(f).collect(),
        Mode::Sequential => range.map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_range<R, F>(range: std::ops::Range<usize>, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    range.map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let items: Vec<u64> = (0..1000).collect();
        let seq = with_mode(Mode::Sequential, || map(&items, |x| x * x + 1));
        let par = with_mode(Mode::Parallel, || map(&items, |x| x * x + 1));
        assert_eq!(seq, par);
        let r = map_range(0..10, |i| i * 2);
        assert_eq!(r, vec![0, 2, 4, 6, 8, 10, 12, 14, 16, 18]);
    }
}
