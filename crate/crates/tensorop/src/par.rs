//! Parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature these delegate to rayon. Without it they run
//! the same closures on a single thread. Results are always returned in input
//! order so that output never depends on scheduling. [`set_sequential`]
//! switches a parallel build to the single-threaded paths at run time, which
//! lets one binary time both.

#[cfg(feature = "parallel")]
use rayon::prelude::*;
#[cfg(feature = "parallel")]
use std::sync::atomic::{AtomicBool, Ordering};

#[cfg(feature = "parallel")]
static FORCE_SEQUENTIAL: AtomicBool = AtomicBool::new(false);

/// Routes all helpers through the single-threaded paths while `on` is set.
/// Has no effect without the `parallel` feature.
pub fn set_sequential(on: bool) {
    #[cfg(feature = "parallel")]
    FORCE_SEQUENTIAL.store(on, Ordering::Relaxed);
    #[cfg(not(feature = "parallel"))]
    let _ = on;
}

#[cfg(feature = "parallel")]
fn threaded() -> bool {
    !FORCE_SEQUENTIAL.load(Ordering::Relaxed)
}

/// Maps `f` over `items`, preserving order.
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if threaded() {
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}

/// Maps `f` over `items` and concatenates the resulting vectors in order.
pub fn flat_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Vec<R> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if threaded() {
        return items.par_iter().flat_map_iter(f).collect();
    }
    items.iter().flat_map(f).collect()
}

/// Returns true when `f` holds for every item.
pub fn all<T, F>(items: &[T], f: F) -> bool
where
    T: Sync,
    F: Fn(&T) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if threaded() {
        return items.par_iter().all(f);
    }
    items.iter().all(f)
}

/// Maps a range of indices, preserving order.
pub fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if threaded() {
        return (0..n).into_par_iter().map(f).collect();
    }
    (0..n).map(f).collect()
}

/// True when the rayon backend is built in and not switched off.
pub fn is_parallel() -> bool {
    #[cfg(feature = "parallel")]
    return threaded();
    #[cfg(not(feature = "parallel"))]
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_preserves_order() {
        let v: Vec<u32> = (0..1000).collect();
        assert_eq!(map(&v, |x| x * 2), v.iter().map(|x| x * 2).collect::<Vec<_>>());
    }

    #[test]
    fn flat_map_concatenates_in_order() {
        let v = vec![1usize, 2, 3];
        assert_eq!(flat_map(&v, |&n| vec![n; n]), vec![1, 2, 2, 3, 3, 3]);
    }

    #[test]
    fn sequential_switch_keeps_results() {
        let v: Vec<usize> = (0..500).collect();
        let threaded = flat_map(&v, |&n| vec![n; n % 3]);
        set_sequential(true);
        let single = flat_map(&v, |&n| vec![n; n % 3]);
        set_sequential(false);
        assert_eq!(threaded, single);
    }
}
