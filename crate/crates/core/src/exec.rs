//! Execution strategy for the data-parallel loops.
//!
//! Every parallel loop has a sequential twin and both produce identical
//! results: searches return the first hit in index order and reductions
//! break ties by index. Without the `parallel` feature, [`Exec::Parallel`]
//! runs sequentially.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }
}

/// First index in `0..len` (in index order) for which `f` returns `Some`.
pub(crate) fn find_first<T, F>(exec: Exec, len: u64, f: F) -> Option<T>
where
    T: Send,
    F: Fn(u64) -> Option<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() && len > 1 {
        return (0..len).into_par_iter().find_map_first(f);
    }
    let _ = exec;
    (0..len).find_map(f)
}

/// `f` applied to every index, results in index order.
pub(crate) fn map<T, F>(exec: Exec, len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() && len > 1 {
        return (0..len).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..len).map(f).collect()
}

/// The minimum of `f` over `0..len` under `Ord`, ties broken by the smaller
/// index. `f` may skip an index by returning `None`.
pub(crate) fn min_by_key<K, F>(exec: Exec, len: u64, f: F) -> Option<(u64, K)>
where
    K: Ord + Send,
    F: Fn(u64) -> Option<K> + Sync + Send,
{
    let better = |a: Option<(u64, K)>, b: Option<(u64, K)>| match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => {
            if (&b.1, b.0) < (&a.1, a.0) {
                Some(b)
            } else {
                Some(a)
            }
        }
    };
    #[cfg(feature = "parallel")]
    if exec.is_parallel() && len > 1 {
        return (0..len)
            .into_par_iter()
            .map(|i| f(i).map(|k| (i, k)))
            .reduce(|| None, better);
    }
    let _ = exec;
    (0..len).map(|i| f(i).map(|k| (i, k))).fold(None, better)
}
