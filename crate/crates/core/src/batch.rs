//! Data-parallel evaluation with a sequential fallback.
//!
//! With the `parallel` feature (on by default) batches run on the rayon
//! global pool when requested; without it every call is sequential. Results
//! are always returned in input order, so both paths give identical output
//! for pure functions.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// A function minimized over a box. Must be pure: evaluations may run concurrently.
pub trait Objective: Sync {
    fn evaluate(&self, x: &[f64]) -> f64;
}

impl<F> Objective for F
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    fn evaluate(&self, x: &[f64]) -> f64 {
        self(x)
    }
}

/// True when this build can run batches in parallel.
pub const fn parallel_available() -> bool {
    cfg!(feature = "parallel")
}

/// Scores every point, in order.
pub fn evaluate_all<O, P>(objective: &O, points: &[P], parallel: bool) -> Vec<f64>
where
    O: Objective + ?Sized,
    P: AsRef<[f64]> + Sync,
{
    map_ordered(points, parallel, |p| objective.evaluate(p.as_ref()))
}

/// Maps `f` over `items`, keeping input order.
pub fn map_ordered<T, R, F>(items: &[T], parallel: bool, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel {
        return items.par_iter().map(f).collect();
    }
    let _ = parallel;
    items.iter().map(f).collect()
}
