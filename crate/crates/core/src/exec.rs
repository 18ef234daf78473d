//! Data-parallel execution with a sequential fallback.
//!
//! All parallel maps here preserve input order, so results are identical
//! whichever variant runs. Without the `parallel` feature,
//! [`Execution::Parallel`] silently runs sequentially.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How data-parallel loops are executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether this build can actually run loops in parallel.
    pub fn parallel_available() -> bool {
        cfg!(feature = "parallel")
    }

    /// Maps `f` over `0..len`, keeping index order.
    pub fn map_indexed<T, F>(self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => (0..len).into_par_iter().map(f).collect(),
            _ => (0..len).map(f).collect(),
        }
    }

    /// Splits `0..len` into contiguous chunks, runs `f(start, end)` on each
    /// and concatenates the outputs in chunk order.
    pub fn flat_map_chunks<T, F>(self, len: usize, chunk: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize, usize) -> Vec<T> + Sync + Send,
    {
        let chunk = chunk.max(1);
        let chunks = len.div_ceil(chunk);
        let run = |c: usize| {
            let start = c * chunk;
            f(start, (start + chunk).min(len))
        };
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => (0..chunks).into_par_iter().flat_map_iter(run).collect(),
            _ => (0..chunks).flat_map(run).collect(),
        }
    }

    /// Like [`Execution::flat_map_chunks`] but each chunk may fail; the first
    /// error in chunk order wins.
    pub fn try_flat_map_chunks<T, E, F>(self, len: usize, chunk: usize, f: F) -> Result<Vec<T>, E>
    where
        T: Send,
        E: Send,
        F: Fn(usize, usize) -> Result<Vec<T>, E> + Sync + Send,
    {
        let chunk = chunk.max(1);
        let chunks = len.div_ceil(chunk);
        let parts: Vec<Result<Vec<T>, E>> = self.map_indexed(chunks, |c| {
            let start = c * chunk;
            f(start, (start + chunk).min(len))
        });
        let mut out = Vec::with_capacity(len);
        for part in parts {
            out.extend(part?);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_modes_agree() {
        let seq = Execution::Sequential.flat_map_chunks(1000, 7, |a, b| (a..b).map(|i| i * i).collect());
        let par = Execution::Parallel.flat_map_chunks(1000, 7, |a, b| (a..b).map(|i| i * i).collect());
        assert_eq!(seq, par);
        assert_eq!(seq.len(), 1000);
        assert_eq!(seq[999], 999 * 999);
    }

    #[test]
    fn first_error_in_order_wins() {
        let r: Result<Vec<usize>, usize> = Execution::Parallel.try_flat_map_chunks(100, 10, |a, b| {
            if a >= 30 {
                Err(a)
            } else {
                Ok((a..b).collect())
            }
        });
        assert_eq!(r, Err(30));
    }

    #[test]
    fn empty_range() {
        let v: Vec<u8> = Execution::Parallel.map_indexed(0, |_| 1);
        assert!(v.is_empty());
    }
}
