//! Execution policy for the data-parallel loops.
//!
//! With the `parallel` feature off every policy runs sequentially. Results
//! never depend on the schedule: searches return the lowest matching index
//! and collections keep index order.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

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

impl Exec {
    /// Parallel only when the feature is compiled in and the job is big enough.
    pub fn for_size(self, work: usize) -> Exec {
        match self {
            Exec::Parallel if cfg!(feature = "parallel") && work >= PAR_THRESHOLD => Exec::Parallel,
            _ => Exec::Sequential,
        }
    }

    /// Lowest index in `range` for which `pred` holds.
    pub fn find_first<F>(self, range: Range<u64>, pred: F) -> Option<u64>
    where
        F: Fn(u64) -> bool + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => range.into_par_iter().find_first(|&i| pred(i)),
            _ => range.into_iter().find(|&i| pred(i)),
        }
    }

    /// `f` applied to every index, in order.
    pub fn map<R, F>(self, range: Range<usize>, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => range.into_par_iter().map(f).collect(),
            _ => range.map(f).collect(),
        }
    }

    /// The `Some` results of `f`, in index order.
    pub fn filter_map<R, F>(self, range: Range<usize>, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> Option<R> + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => range.into_par_iter().filter_map(f).collect(),
            _ => range.filter_map(f).collect(),
        }
    }
}

/// Below this many elementary steps the thread-pool overhead dominates.
pub const PAR_THRESHOLD: usize = 4096;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn find_first_is_lowest() {
        for exec in [Exec::Sequential, Exec::Parallel] {
            assert_eq!(exec.find_first(0..100_000, |i| i % 977 == 976), Some(976));
            assert_eq!(exec.find_first(0..10, |_| false), None);
        }
    }

    #[test]
    fn map_keeps_order() {
        let a = Exec::Sequential.map(0..5000, |i| i * 3);
        let b = Exec::Parallel.map(0..5000, |i| i * 3);
        assert_eq!(a, b);
        let c = Exec::Parallel.filter_map(0..5000, |i| (i % 7 == 0).then_some(i));
        assert_eq!(c.len(), 715);
        assert!(c.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn small_jobs_stay_sequential() {
        assert_eq!(Exec::Parallel.for_size(10), Exec::Sequential);
        assert_eq!(Exec::Sequential.for_size(1 << 20), Exec::Sequential);
    }
}
