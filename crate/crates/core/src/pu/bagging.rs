use alloc::vec;
use alloc::vec::Vec;

use super::{bootstrap_seed, draw_subsample, Aggregation, BaggingConfig, Executor};
use crate::classifiers::{train, DecisionModel, WeightedClassifier};
use crate::data::{Dataset, PuSplit, SparseVec};
use crate::error::{Error, Result};
use crate::eval;

/// What one bootstrap drew and, when the truth is known, how contaminated it was.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BootstrapRecord {
    /// Positions into `split.unlabeled()`, sorted, with multiplicity.
    pub subsample: Vec<usize>,
    /// Fraction of hidden positives among the drawn items.
    pub contamination: Option<f64>,
    /// AUC of this bootstrap's classifier on a held-out test set.
    pub test_auc: Option<f64>,
    pub converged: bool,
}

impl BootstrapRecord {
    /// Distinct positions of the subsample.
    pub fn distinct(&self) -> Vec<usize> {
        let mut d = self.subsample.clone();
        d.dedup();
        d
    }
}

struct Bootstrap {
    classifier: WeightedClassifier,
    record: BootstrapRecord,
}

fn fit_bootstrap(
    ds: &Dataset,
    split: &PuSplit,
    cfg: &BaggingConfig,
    k: usize,
    t: usize,
) -> Result<Bootstrap> {
    let unlabeled = split.unlabeled();
    let seed = bootstrap_seed(cfg.seed, t);
    let subsample = draw_subsample(unlabeled.len(), k, cfg.sampling, seed);
    let pos = ds.select(split.positives());
    let neg: Vec<&SparseVec> = subsample.iter().map(|&u| ds.row(unlabeled[u])).collect();
    // The solver seed is shared, so identical subsamples give identical classifiers.
    let classifier = train(cfg.learner, &pos, &neg, &cfg.train)?;
    let contamination = subsample
        .iter()
        .map(|&u| ds.label(unlabeled[u]).map(|l| l.is_positive()))
        .collect::<Option<Vec<bool>>>()
        .map(|truth| truth.iter().filter(|&&t| t).count() as f64 / k as f64);
    let record = BootstrapRecord {
        subsample,
        contamination,
        test_auc: None,
        converged: classifier.diagnostics.converged,
    };
    Ok(Bootstrap { classifier, record })
}

fn run_bootstraps<E: Executor>(
    ds: &Dataset,
    split: &PuSplit,
    cfg: &BaggingConfig,
    exec: &E,
) -> Result<(usize, Vec<Bootstrap>)> {
    let (k, t) = cfg.resolve(split.positives().len(), split.unlabeled().len())?;
    let fits = exec
        .run(t, |i| fit_bootstrap(ds, split, cfg, k, i))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok((k, fits))
}

/// The inductive bagging aggregate `f = (1/T) sum_t f_t` (or the mean vote).
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BaggedClassifier {
    pub members: Vec<WeightedClassifier>,
    pub aggregation: Aggregation,
    pub bootstraps: Vec<BootstrapRecord>,
    /// Averaged weights when every member is linear and aggregation is the mean.
    averaged: Option<DecisionModel>,
}

impl BaggedClassifier {
    fn new(
        members: Vec<WeightedClassifier>,
        aggregation: Aggregation,
        bootstraps: Vec<BootstrapRecord>,
    ) -> Self {
        let averaged = (aggregation == Aggregation::Mean)
            .then(|| average_linear(&members))
            .flatten();
        BaggedClassifier {
            members,
            aggregation,
            bootstraps,
            averaged,
        }
    }

    pub fn decision(&self, x: &SparseVec) -> f64 {
        if let Some(model) = &self.averaged {
            return model.decision(x);
        }
        let total: f64 = self
            .members
            .iter()
            .map(|m| self.aggregation.member_value(m.decision(x)))
            .sum();
        total / self.members.len() as f64
    }

    pub fn member_decisions(&self, x: &SparseVec) -> Vec<f64> {
        self.members.iter().map(|m| m.decision(x)).collect()
    }
}

/// Mean of linear members, accumulated in bootstrap order.
fn average_linear(members: &[WeightedClassifier]) -> Option<DecisionModel> {
    let mut dim = 0;
    for m in members {
        match &m.model {
            DecisionModel::Linear { weights, .. } => dim = dim.max(weights.len()),
            DecisionModel::Expansion { .. } => return None,
        }
    }
    let mut sum = vec![0.0; dim];
    let mut bias_sum = 0.0;
    for m in members {
        if let DecisionModel::Linear { weights, bias } = &m.model {
            for (s, w) in sum.iter_mut().zip(weights) {
                *s += w;
            }
            bias_sum += bias;
        }
    }
    let scale = 1.0 / members.len() as f64;
    Some(DecisionModel::Linear {
        weights: sum.into_iter().map(|s| s * scale).collect(),
        bias: bias_sum * scale,
    })
}

pub fn bagging_inductive<E: Executor>(
    ds: &Dataset,
    split: &PuSplit,
    cfg: &BaggingConfig,
    exec: &E,
) -> Result<BaggedClassifier> {
    let (_, fits) = run_bootstraps(ds, split, cfg, exec)?;
    let (members, records) = fits.into_iter().map(|b| (b.classifier, b.record)).unzip();
    Ok(BaggedClassifier::new(members, cfg.aggregation, records))
}

/// Per-bootstrap contamination and individual test AUC, without keeping the
/// classifiers. `test` must carry ground truth for every item.
pub fn bootstrap_diagnostics<E: Executor>(
    ds: &Dataset,
    split: &PuSplit,
    cfg: &BaggingConfig,
    test: &Dataset,
    exec: &E,
) -> Result<Vec<BootstrapRecord>> {
    let all: Vec<usize> = (0..test.n_items()).collect();
    let truth = test.truth_of(&all).ok_or_else(|| {
        Error::InvalidDataset("test set needs ground truth for every item".into())
    })?;
    let (k, t) = cfg.resolve(split.positives().len(), split.unlabeled().len())?;
    exec.run(t, |i| {
        let mut fit = fit_bootstrap(ds, split, cfg, k, i)?;
        let scores: Vec<f64> = test
            .rows()
            .iter()
            .map(|x| fit.classifier.decision(x))
            .collect();
        fit.record.test_auc = Some(eval::auc(&scores, &truth)?);
        Ok(fit.record)
    })
    .into_iter()
    .collect()
}

/// Transductive score of one unlabeled item.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ItemScore {
    /// Index into the dataset.
    pub item: usize,
    /// `f(x)`: sum of the aggregated values of contributing classifiers.
    pub sum: f64,
    /// `n(x)`: number of classifiers whose subsample excluded the item.
    pub count: usize,
    /// `s(x) = f(x) / n(x)`, or the fallback score when `count == 0`.
    pub score: f64,
    /// The item was never left out; `score` is the mean over all classifiers.
    pub fallback: bool,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EnsembleScore {
    /// One entry per item of `U`, in `split.unlabeled()` order.
    pub items: Vec<ItemScore>,
    pub bootstraps: Vec<BootstrapRecord>,
}

impl EnsembleScore {
    pub fn scores(&self) -> Vec<f64> {
        self.items.iter().map(|s| s.score).collect()
    }

    /// Dataset indices of items scored by the fallback rule.
    pub fn flagged(&self) -> Vec<usize> {
        self.items
            .iter()
            .filter(|s| s.fallback)
            .map(|s| s.item)
            .collect()
    }
}

/// Bookkeeping exposed for auditing the exclusion rule.
#[derive(Clone, Debug, PartialEq)]
pub struct TransductiveTrace {
    /// `decisions[t][u]`: `f_t` at unlabeled position `u`, for every `u`.
    pub decisions: Vec<Vec<f64>>,
    /// `contributors[u]`: bootstraps that contributed to position `u`, in order.
    pub contributors: Vec<Vec<usize>>,
}

pub fn bagging_transductive<E: Executor>(
    ds: &Dataset,
    split: &PuSplit,
    cfg: &BaggingConfig,
    exec: &E,
) -> Result<EnsembleScore> {
    bagging_transductive_traced(ds, split, cfg, exec).map(|(score, _)| score)
}

pub fn bagging_transductive_traced<E: Executor>(
    ds: &Dataset,
    split: &PuSplit,
    cfg: &BaggingConfig,
    exec: &E,
) -> Result<(EnsembleScore, TransductiveTrace)> {
    let (k, t) = cfg.resolve(split.positives().len(), split.unlabeled().len())?;
    let unlabeled = split.unlabeled();
    let per_bootstrap = exec
        .run(t, |i| {
            let fit = fit_bootstrap(ds, split, cfg, k, i)?;
            let decisions: Vec<f64> = unlabeled
                .iter()
                .map(|&u| fit.classifier.decision(ds.row(u)))
                .collect();
            Ok((fit.record, decisions))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let n_u = unlabeled.len();
    let mut sum = vec![0.0; n_u];
    let mut count = vec![0usize; n_u];
    let mut all_sum = vec![0.0; n_u];
    let mut contributors = vec![Vec::new(); n_u];
    let mut in_subsample = vec![false; n_u];
    for (t_index, (record, decisions)) in per_bootstrap.iter().enumerate() {
        in_subsample.iter_mut().for_each(|f| *f = false);
        for &u in &record.subsample {
            in_subsample[u] = true;
        }
        for u in 0..n_u {
            let value = cfg.aggregation.member_value(decisions[u]);
            all_sum[u] += value;
            if !in_subsample[u] {
                sum[u] += value;
                count[u] += 1;
                contributors[u].push(t_index);
            }
        }
    }

    let items = (0..n_u)
        .map(|u| {
            let fallback = count[u] == 0;
            let score = if fallback {
                all_sum[u] / t as f64
            } else {
                sum[u] / count[u] as f64
            };
            ItemScore {
                item: unlabeled[u],
                sum: sum[u],
                count: count[u],
                score,
                fallback,
            }
        })
        .collect();
    let (bootstraps, decisions) = per_bootstrap.into_iter().unzip();
    Ok((
        EnsembleScore { items, bootstraps },
        TransductiveTrace {
            decisions,
            contributors,
        },
    ))
}
