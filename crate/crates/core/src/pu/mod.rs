//! PU meta-algorithms.
//!
//! Bagging discriminates the known positives `P` from `T` random subsamples of
//! the unlabeled set `U`, each of size `K`, and aggregates the resulting
//! classifiers. The inductive variant returns the aggregate as a classifier;
//! the transductive variant scores every item of `U` using only the classifiers
//! whose subsample left that item out.

mod bagging;
mod baselines;
mod contamination;

use alloc::format;
use alloc::vec::Vec;

use rand::seq::index;
use rand::Rng as _;

pub use bagging::{
    bagging_inductive, bagging_transductive, bagging_transductive_traced, bootstrap_diagnostics,
    BaggedClassifier, BootstrapRecord, EnsembleScore, ItemScore, TransductiveTrace,
};
pub use baselines::{biased_baseline, mean_similarity_baseline, BiasedFit};
pub use contamination::{contamination_draws, expected_moments, ContaminationMoments};

use crate::classifiers::{Learner, TrainConfig};
use crate::error::{Error, Result};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Sampling {
    WithoutReplacement,
    /// Draws with replacement; duplicates are trained on as duplicates, and the
    /// transductive exclusion uses the set of distinct drawn items.
    WithReplacement,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Aggregation {
    Mean,
    /// Mean of `sign(f_t(x))` votes in `[-1, 1]`; `f_t(x) = 0` votes `+1`.
    MajorityVote,
}

impl Aggregation {
    fn member_value(self, decision: f64) -> f64 {
        match self {
            Aggregation::Mean => decision,
            Aggregation::MajorityVote => {
                if decision >= 0.0 {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BaggingConfig {
    /// `K`; defaults to `|P|`.
    pub subsample_size: Option<usize>,
    /// `T`; defaults to [`default_bootstraps`] of `K`.
    pub n_bootstraps: Option<usize>,
    pub sampling: Sampling,
    pub aggregation: Aggregation,
    pub learner: Learner,
    pub train: TrainConfig,
    pub seed: u64,
}

impl BaggingConfig {
    pub fn new(learner: Learner, train: TrainConfig) -> Self {
        BaggingConfig {
            subsample_size: None,
            n_bootstraps: None,
            sampling: Sampling::WithoutReplacement,
            aggregation: Aggregation::Mean,
            learner,
            train,
            seed: 0,
        }
    }

    pub fn with_subsample_size(self, k: usize) -> Self {
        BaggingConfig {
            subsample_size: Some(k),
            ..self
        }
    }

    pub fn with_bootstraps(self, t: usize) -> Self {
        BaggingConfig {
            n_bootstraps: Some(t),
            ..self
        }
    }

    pub fn with_sampling(self, sampling: Sampling) -> Self {
        BaggingConfig { sampling, ..self }
    }

    pub fn with_aggregation(self, aggregation: Aggregation) -> Self {
        BaggingConfig {
            aggregation,
            ..self
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        BaggingConfig { seed, ..self }
    }

    /// Concrete `(K, T)` for the given sizes of `P` and `U`.
    pub fn resolve(&self, n_pos: usize, n_unlabeled: usize) -> Result<(usize, usize)> {
        self.train.validate()?;
        if n_pos == 0 || n_unlabeled == 0 {
            return Err(Error::InvalidConfig("P and U must be non-empty".into()));
        }
        let k = self.subsample_size.unwrap_or(n_pos);
        if k == 0 {
            return Err(Error::InvalidConfig("subsample size must be at least 1".into()));
        }
        if self.sampling == Sampling::WithoutReplacement && k > n_unlabeled {
            return Err(Error::InvalidConfig(format!(
                "subsample size {k} exceeds |U| = {n_unlabeled} without replacement"
            )));
        }
        let t = self.n_bootstraps.unwrap_or_else(|| default_bootstraps(k));
        if t == 0 {
            return Err(Error::InvalidConfig("at least one bootstrap is needed".into()));
        }
        Ok((k, t))
    }
}

/// `T = 35` for `K <= 20`, `T = 10` for `K > 30`, rounded linear interpolation between.
pub fn default_bootstraps(k: usize) -> usize {
    match k {
        0..=20 => 35,
        21..=30 => libm::round(35.0 - 2.5 * (k - 20) as f64) as usize,
        _ => 10,
    }
}

/// Smallest `|U| / |P|` ratio above which bagging with `K = |P|` and `T`
/// bootstraps is cheaper than one fit on `P + U`, for a learner costing `N^alpha`.
pub fn speedup_threshold(t: f64, alpha: f64) -> f64 {
    2.0 * libm::pow(t, 1.0 / alpha) - 1.0
}

/// Runs independent indexed tasks and returns their results in index order.
pub trait Executor {
    fn run<R, F>(&self, n: usize, task: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn run<R, F>(&self, n: usize, task: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        (0..n).map(task).collect()
    }
}

/// Positions (into `U`) drawn for one bootstrap, sorted, duplicates kept.
pub fn draw_subsample(n_unlabeled: usize, k: usize, sampling: Sampling, seed: u64) -> Vec<usize> {
    let mut rng = rng::seeded(seed);
    let mut draws: Vec<usize> = match sampling {
        Sampling::WithoutReplacement => index::sample(&mut rng, n_unlabeled, k).into_vec(),
        Sampling::WithReplacement => (0..k).map(|_| rng.random_range(0..n_unlabeled)).collect(),
    };
    draws.sort_unstable();
    draws
}

/// Seed of the subsample drawn by bootstrap `t`.
pub(crate) fn bootstrap_seed(seed: u64, t: usize) -> u64 {
    rng::derive(seed, t as u64)
}
