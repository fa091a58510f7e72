//! Parallel/sequential execution helpers.
//!
//! The heavy loops in this crate are embarrassingly parallel (fault pattern
//! blocks, annealing restarts, sweep grid points). They all funnel through
//! `map_collect` so the crate builds and runs identically with the `parallel`
//! feature disabled. Results are collected in input order, so output is
//! deterministic either way.

/// Which execution backend to use for a data-parallel region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for Exec {
    #[cfg(feature = "parallel")]
    fn default() -> Self {
        Exec::Parallel
    }
    #[cfg(not(feature = "parallel"))]
    fn default() -> Self {
        Exec::Sequential
    }
}

/// Maps `f` over `items`, preserving order.
pub fn map_collect<T, U, F>(exec: Exec, items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    match exec {
        Exec::Sequential => items.into_iter().map(f).collect(),
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            items.into_par_iter().map(f).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let items: Vec<u64> = (0..1000).collect();
        let seq = map_collect(Exec::Sequential, items.clone(), |x| x * x);
        let def = map_collect(Exec::default(), items, |x| x * x);
        assert_eq!(seq, def);
    }
}
