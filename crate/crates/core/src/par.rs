//! Data parallel helpers with a sequential fallback. With the `parallel`
//! feature off every helper runs on the calling thread.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub fn filter_map_range<T, F>(n: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> Option<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().filter_map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        filter_map_range_seq(n, f)
    }
}

pub fn filter_map_range_seq<T, F>(n: u64, f: F) -> Vec<T>
where
    F: Fn(u64) -> Option<T>,
{
    (0..n).filter_map(f).collect()
}

pub fn map_slice<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
