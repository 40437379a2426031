//! Suite execution strategy: data-parallel over independent items via
//! rayon, or plain sequential iteration. The sequential path is always
//! compiled and is the fallback when the `parallel` feature is off.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How a verification suite walks its item space. Results are identical
/// either way; reports are merged associatively and sorted, so the choice
/// affects wall-clock time only.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

// not derivable: the default variant depends on the feature set
#[allow(clippy::derivable_impls)]
impl Default for ExecMode {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        {
            ExecMode::Parallel
        }
        #[cfg(not(feature = "parallel"))]
        {
            ExecMode::Sequential
        }
    }
}

pub(crate) fn flat_map<T, U, F>(mode: ExecMode, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> Vec<U> + Sync + Send,
{
    match mode {
        ExecMode::Sequential => items.iter().flat_map(&f).collect(),
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => items.par_iter().flat_map_iter(f).collect(),
    }
}

/// Like [`flat_map`] but with the item index, for deterministic per-item
/// seeding under any thread schedule.
pub(crate) fn indexed_flat_map<T, U, F>(mode: ExecMode, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(usize, &T) -> Vec<U> + Sync + Send,
{
    match mode {
        ExecMode::Sequential => items
            .iter()
            .enumerate()
            .flat_map(|(i, t)| f(i, t))
            .collect(),
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => items
            .par_iter()
            .enumerate()
            .flat_map_iter(|(i, t)| f(i, t))
            .collect(),
    }
}
