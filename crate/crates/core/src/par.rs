//! Execution strategy switch shared by the data-parallel kernels.
//!
//! Results are always assembled in index order, so output never depends on
//! the strategy. Without the `parallel` feature `Exec::Parallel` silently
//! runs sequentially.

use std::ops::Range;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

/// `f` over every index of `range`, results in index order.
pub fn map_range<R, F>(exec: Exec, range: Range<usize>, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            range.into_par_iter().map(f).collect()
        }
        _ => range.map(f).collect(),
    }
}

/// `f` over every element of `items`, results in slice order.
pub fn map_slice<T, R, F>(exec: Exec, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        _ => items.iter().map(f).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_strategies_preserve_order() {
        let seq = map_range(Exec::Sequential, 0..1000, |i| i * i);
        let par = map_range(Exec::Parallel, 0..1000, |i| i * i);
        assert_eq!(seq, par);
        let items: Vec<u32> = (0..500).collect();
        assert_eq!(
            map_slice(Exec::Sequential, &items, |x| x + 1),
            map_slice(Exec::Parallel, &items, |x| x + 1)
        );
    }
}
