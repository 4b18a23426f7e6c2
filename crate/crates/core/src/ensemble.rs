//! Order-preserving maps over trial indices.
//!
//! Results come back indexed by trial, so any later reduction runs in a fixed
//! order and the output is bit-identical for every thread count.

use crate::error::Result;

/// Applies `f` to trial indices 0..trials in sequence.
pub fn map_trials_sequential<T, F>(trials: usize, f: F) -> Vec<T>
where
    F: Fn(u64) -> T,
{
    (0..trials as u64).map(f).collect()
}

/// Applies `f` to trial indices 0..trials on the current rayon pool.
#[cfg(feature = "parallel")]
pub fn map_trials_parallel<T, F>(trials: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..trials as u64).into_par_iter().map(f).collect()
}

/// Parallel when the `parallel` feature is on, sequential otherwise.
pub fn map_trials<T, F>(trials: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        map_trials_parallel(trials, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_trials_sequential(trials, f)
    }
}

/// Fallible variant; the error reported is the one from the lowest trial index.
pub fn try_map_trials<T, F>(trials: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    map_trials(trials, f).into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn order_is_preserved() {
        let out = map_trials(1000, |i| i * i);
        assert_eq!(out, map_trials_sequential(1000, |i| i * i));
        assert_eq!(out[31], 961);
    }

    #[test]
    fn first_error_wins() {
        let r: Result<Vec<u64>> =
            try_map_trials(50, |i| if i % 7 == 3 { Err(Error::InvalidArgument(format!("{i}"))) } else { Ok(i) });
        assert_eq!(r, Err(Error::InvalidArgument("3".into())));
    }
}
