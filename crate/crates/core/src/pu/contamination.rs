//! Contamination of bootstrap subsamples.
//!
//! A subsample of size `K` drawn with replacement from a pool with realized
//! contamination `g` holds `B(K, g)` hidden positives, so its contamination has
//! mean `g` and variance `g(1 - g)/K`. Without replacement the count is
//! hypergeometric and the variance gains the factor `(N - K)/(N - 1)`.

use alloc::vec::Vec;

use super::{bootstrap_seed, draw_subsample, Sampling};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContaminationMoments {
    pub mean: f64,
    pub variance: f64,
}

/// Contamination of `n_draws` subsamples drawn exactly as bagging with `seed`
/// draws them. `truth[u]` is the hidden label of unlabeled position `u`.
pub fn contamination_draws(
    truth: &[bool],
    k: usize,
    sampling: Sampling,
    n_draws: usize,
    seed: u64,
) -> Vec<f64> {
    (0..n_draws)
        .map(|t| {
            let draws = draw_subsample(truth.len(), k, sampling, bootstrap_seed(seed, t));
            draws.iter().filter(|&&u| truth[u]).count() as f64 / k as f64
        })
        .collect()
}

pub fn expected_moments(
    realized: f64,
    pool_size: usize,
    k: usize,
    sampling: Sampling,
) -> ContaminationMoments {
    let binomial = realized * (1.0 - realized) / k as f64;
    let variance = match sampling {
        Sampling::WithReplacement => binomial,
        Sampling::WithoutReplacement if pool_size > 1 => {
            binomial * (pool_size - k) as f64 / (pool_size - 1) as f64
        }
        Sampling::WithoutReplacement => 0.0,
    };
    ContaminationMoments {
        mean: realized,
        variance,
    }
}
