use alloc::vec::Vec;

use crate::classifiers::{train, Kernel, Learner, TrainConfig, WeightedClassifier};
use crate::data::{Dataset, PuSplit, SparseVec};
use crate::error::Result;

/// One classifier of `P` against all of `U`, plus its training-time scores on `U`.
#[derive(Clone, Debug, PartialEq)]
pub struct BiasedFit {
    pub classifier: WeightedClassifier,
    /// Decision values in `split.unlabeled()` order.
    pub scores: Vec<f64>,
}

/// The biased SVM / weighted logistic regression approach. `cfg.costs` should
/// be the balanced rule (the default) for the classical formulation.
pub fn biased_baseline(
    ds: &Dataset,
    split: &PuSplit,
    learner: Learner,
    cfg: &TrainConfig,
) -> Result<BiasedFit> {
    let pos = ds.select(split.positives());
    let neg = ds.select(split.unlabeled());
    let classifier = train(learner, &pos, &neg, cfg)?;
    let scores = neg.iter().map(|x| classifier.decision(x)).collect();
    Ok(BiasedFit { classifier, scores })
}

/// Mean kernel similarity of each item to the positives.
pub fn mean_similarity_baseline(
    positives: &[&SparseVec],
    items: &[&SparseVec],
    kernel: Kernel,
) -> Vec<f64> {
    let scale = 1.0 / positives.len() as f64;
    items
        .iter()
        .map(|x| positives.iter().map(|p| kernel.eval(p, x)).sum::<f64>() * scale)
        .collect()
}
