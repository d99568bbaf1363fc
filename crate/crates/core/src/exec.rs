//! Execution policy for the data-parallel loops.
//!
//! Work is split into fixed-size chunks whose boundaries do not depend on the number of
//! threads; partial results are combined in chunk order. The sequential and parallel
//! paths therefore perform the same floating-point operations in the same order.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Items per chunk in [`Exec::chunked_sum`].
pub const CHUNK: usize = 8;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    /// Rayon-backed when the `parallel` feature is on, sequential otherwise.
    #[default]
    Parallel,
}

impl Exec {
    /// `true` when this policy will actually fan out to the rayon pool.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    /// Order-preserving map over `0..n`.
    pub fn map_range<R, F>(self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }

    /// Order-preserving map over a slice.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// Sums `dim`-vectors produced chunk by chunk over `0..n`.
    ///
    /// `f(range, acc)` must add the contribution of the items in `range` into `acc`.
    pub fn chunked_sum<F>(self, n: usize, dim: usize, f: F) -> Vec<f64>
    where
        F: Fn(Range<usize>, &mut [f64]) + Sync + Send,
    {
        let chunks = n.div_ceil(CHUNK);
        let partials = self.map_range(chunks, |c| {
            let mut acc = vec![0.0; dim];
            f(c * CHUNK..((c + 1) * CHUNK).min(n), &mut acc);
            acc
        });
        let mut total = vec![0.0; dim];
        for part in &partials {
            for (t, p) in total.iter_mut().zip(part) {
                *t += p;
            }
        }
        total
    }
}

/// Left-to-right sum.
pub fn ordered_sum(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |acc, v| acc + v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequential_and_parallel_agree_bitwise() {
        let f = |r: Range<usize>, acc: &mut [f64]| {
            for i in r {
                acc[0] += (i as f64).sqrt();
                acc[1] += 1.0 / (1.0 + i as f64);
            }
        };
        let a = Exec::Sequential.chunked_sum(1001, 2, f);
        let b = Exec::Parallel.chunked_sum(1001, 2, f);
        assert_eq!(a, b);
    }

    #[test]
    fn map_preserves_order() {
        let v = Exec::Parallel.map_range(100, |i| i * i);
        assert!(v.iter().enumerate().all(|(i, &x)| x == i * i));
    }
}
