//! Index-parallel map with a per-worker scratch buffer.
//!
//! Results are written by index, so the output never depends on the number
//! of workers.

use crate::error::Result;

#[cfg(feature = "parallel")]
pub(crate) fn map_indices<T, F>(count: usize, scratch_len: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut Vec<f64>, usize) -> Result<T> + Sync + Send,
{
    use rayon::prelude::*;
    (0..count)
        .into_par_iter()
        .map_init(|| vec![0.0; scratch_len], |buf, k| f(buf, k))
        .collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indices<T, F>(count: usize, scratch_len: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut Vec<f64>, usize) -> Result<T> + Sync + Send,
{
    let mut buf = vec![0.0; scratch_len];
    (0..count).map(|k| f(&mut buf, k)).collect()
}
