use pubag_core::pu::{Executor, Sequential};
use rayon::prelude::*;

/// Runs tasks on the rayon pool. Results come back in index order, so every
/// reduction downstream sees the same sequence as [`Sequential`].
#[derive(Clone, Copy, Debug, Default)]
pub struct Rayon;

impl Executor for Rayon {
    fn run<R, F>(&self, n: usize, task: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        (0..n).into_par_iter().map(task).collect()
    }
}

/// Either executor, picked at run time.
#[derive(Clone, Copy, Debug)]
pub enum Parallelism {
    Sequential,
    Rayon,
}

impl Executor for Parallelism {
    fn run<R, F>(&self, n: usize, task: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        match self {
            Parallelism::Sequential => Sequential.run(n, task),
            Parallelism::Rayon => Rayon.run(n, task),
        }
    }
}
