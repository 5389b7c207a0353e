mod common;

use std::collections::BTreeSet;

use common::blobs;
use pubag_core::classifiers::{train, Kernel, Learner, TrainConfig};
use pubag_core::data::{generate_gaussian_pu, Dataset, Label, PuSplit, SimConfig, SparseVec};
use pubag_core::eval::{auc, mean, std_dev};
use pubag_core::pu::{
    bagging_inductive, bagging_transductive, bagging_transductive_traced, biased_baseline,
    contamination_draws, expected_moments, mean_similarity_baseline, Aggregation, BaggingConfig,
    Executor, Sampling, Sequential,
};
use proptest::prelude::*;

/// Known positives first, then a contaminated unlabeled pool.
fn pu_problem(n_pos: usize, n_unl: usize, d: usize, seed: u64) -> (Dataset, PuSplit) {
    let (pos, unl_pos) = blobs(n_pos + n_unl / 4, n_unl - n_unl / 4, d, seed);
    let mut rows = pos.clone();
    rows.extend(unl_pos);
    let labels = (0..rows.len())
        .map(|i| Some(if i < n_pos + n_unl / 4 { Label::Positive } else { Label::Negative }))
        .collect();
    let ds = Dataset::new(d, rows).with_labels(labels).unwrap();
    let split = PuSplit::new((0..n_pos).collect(), (n_pos..n_pos + n_unl).collect(), ds.n_items())
        .unwrap();
    (ds, split)
}

/// Runs tasks on scoped threads in reverse start order.
struct Threads;

impl Executor for Threads {
    fn run<R, F>(&self, n: usize, task: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..n).rev().map(|i| s.spawn({
                let task = &task;
                move || task(i)
            })).collect();
            let mut out: Vec<R> = handles.into_iter().map(|h| h.join().unwrap()).collect();
            out.reverse();
            out
        })
    }
}

fn svm_bagging(k: usize, t: usize, seed: u64) -> BaggingConfig {
    BaggingConfig::new(Learner::Svm, TrainConfig::svm(1.0))
        .with_subsample_size(k)
        .with_bootstraps(t)
        .with_seed(seed)
}

#[test]
fn single_bootstrap_is_the_base_classifier() {
    let (ds, split) = pu_problem(5, 40, 4, 1);
    for learner in [Learner::Svm, Learner::Logit] {
        let cfg = BaggingConfig::new(learner, TrainConfig::for_learner(learner, 0.5))
            .with_subsample_size(12)
            .with_bootstraps(1)
            .with_seed(77);
        let bag = bagging_inductive(&ds, &split, &cfg, &Sequential).unwrap();
        let drawn: Vec<&SparseVec> = bag.bootstraps[0]
            .subsample
            .iter()
            .map(|&u| ds.row(split.unlabeled()[u]))
            .collect();
        assert_eq!(drawn.len(), 12);
        let base = train(learner, &ds.select(split.positives()), &drawn, &cfg.train).unwrap();
        for x in ds.rows() {
            assert!((bag.decision(x) - base.decision(x)).abs() < 1e-12);
        }
    }
}

#[test]
fn full_subsample_gives_identical_members_and_matches_biased() {
    let (ds, split) = pu_problem(4, 30, 3, 2);
    for learner in [Learner::Svm, Learner::Logit] {
        let train_cfg = TrainConfig::for_learner(learner, 1.0);
        let cfg = BaggingConfig::new(learner, train_cfg)
            .with_subsample_size(30)
            .with_bootstraps(6)
            .with_seed(5);
        let bag = bagging_inductive(&ds, &split, &cfg, &Sequential).unwrap();
        let first = &bag.members[0];
        assert!(bag.members.iter().all(|m| m.model == first.model));

        let single = bagging_inductive(&ds, &split, &cfg.with_bootstraps(1), &Sequential).unwrap();
        let biased = biased_baseline(&ds, &split, learner, &train_cfg).unwrap();
        for (x, s) in ds.select(split.unlabeled()).iter().zip(&biased.scores) {
            assert!((single.decision(x) - s).abs() < 1e-12);
        }
    }
}

#[test]
fn leave_one_out_subsample_scores_one_item() {
    let (ds, split) = pu_problem(4, 25, 3, 3);
    let cfg = svm_bagging(24, 1, 11);
    let (score, trace) = bagging_transductive_traced(&ds, &split, &cfg, &Sequential).unwrap();
    let held_out: Vec<_> = score.items.iter().filter(|s| !s.fallback).collect();
    assert_eq!(held_out.len(), 1);
    assert_eq!(held_out[0].count, 1);
    assert_eq!(score.flagged().len(), 24);
    for (u, item) in score.items.iter().enumerate() {
        assert_eq!(item.score, trace.decisions[0][u]);
    }
}

fn audit(ds: &Dataset, split: &PuSplit, cfg: &BaggingConfig) {
    let (score, trace) = bagging_transductive_traced(ds, split, cfg, &Sequential).unwrap();
    let t = score.bootstraps.len();
    let vote = |f: f64| if f >= 0.0 { 1.0 } else { -1.0 };
    for (u, item) in score.items.iter().enumerate() {
        assert_eq!(item.item, split.unlabeled()[u]);
        let expected: Vec<usize> = (0..t)
            .filter(|&b| !score.bootstraps[b].subsample.contains(&u))
            .collect();
        assert_eq!(trace.contributors[u], expected);
        assert_eq!(item.count, expected.len());
        let value = |b: usize| match cfg.aggregation {
            Aggregation::Mean => trace.decisions[b][u],
            Aggregation::MajorityVote => vote(trace.decisions[b][u]),
        };
        let pool: Vec<usize> = if expected.is_empty() { (0..t).collect() } else { expected };
        let direct = pool.iter().map(|&b| value(b)).sum::<f64>() / pool.len() as f64;
        assert!((item.score - direct).abs() < 1e-12);
        assert_eq!(item.fallback, item.count == 0);
        let lo = pool.iter().map(|&b| value(b)).fold(f64::INFINITY, f64::min);
        let hi = pool.iter().map(|&b| value(b)).fold(f64::NEG_INFINITY, f64::max);
        assert!(lo - 1e-12 <= item.score && item.score <= hi + 1e-12);
    }
}

#[test]
fn transductive_exclusion_audit() {
    let (ds, split) = pu_problem(5, 30, 4, 4);
    for (k, t, sampling, aggregation) in [
        (10, 8, Sampling::WithoutReplacement, Aggregation::Mean),
        (28, 5, Sampling::WithoutReplacement, Aggregation::MajorityVote),
        (45, 6, Sampling::WithReplacement, Aggregation::Mean),
        (7, 12, Sampling::WithReplacement, Aggregation::MajorityVote),
    ] {
        let cfg = svm_bagging(k, t, 9)
            .with_sampling(sampling)
            .with_aggregation(aggregation);
        audit(&ds, &split, &cfg);
    }
}

#[test]
fn exclusion_counts_have_the_expected_mean() {
    let (ds, split) = pu_problem(3, 20, 2, 5);
    let (k, t, reps) = (5, 10, 300);
    for sampling in [Sampling::WithoutReplacement, Sampling::WithReplacement] {
        let counts: Vec<f64> = (0..reps)
            .map(|r| {
                let cfg = svm_bagging(k, t, r).with_sampling(sampling);
                bagging_transductive(&ds, &split, &cfg, &Sequential).unwrap().items[0].count as f64
            })
            .collect();
        let p = match sampling {
            Sampling::WithoutReplacement => 1.0 - k as f64 / 20.0,
            Sampling::WithReplacement => (1.0 - 1.0 / 20.0f64).powi(k as i32),
        };
        let expected = t as f64 * p;
        let se = (t as f64 * p * (1.0 - p) / reps as f64).sqrt();
        assert!((mean(&counts) - expected).abs() < 3.0 * se, "{sampling:?}");
    }
}

#[test]
fn majority_vote_scores_are_vote_fractions() {
    let (ds, split) = pu_problem(5, 30, 4, 6);
    let cfg = svm_bagging(5, 9, 3).with_aggregation(Aggregation::MajorityVote);
    let bag = bagging_inductive(&ds, &split, &cfg, &Sequential).unwrap();
    for x in ds.rows() {
        let votes = bag.member_decisions(x);
        let up = votes.iter().filter(|&&f| f >= 0.0).count() as f64;
        let expected = (2.0 * up - votes.len() as f64) / votes.len() as f64;
        assert!((bag.decision(x) - expected).abs() < 1e-12);
    }
}

#[test]
fn inductive_mean_lies_between_members() {
    let (ds, split) = pu_problem(5, 30, 4, 7);
    for kernel in [Kernel::Linear, Kernel::Rbf { sigma: 2.0 }] {
        let cfg = svm_bagging(6, 7, 1).with_bootstraps(7);
        let cfg = BaggingConfig {
            train: cfg.train.with_kernel(kernel),
            ..cfg
        };
        let bag = bagging_inductive(&ds, &split, &cfg, &Sequential).unwrap();
        for x in ds.rows() {
            let m = bag.member_decisions(x);
            let f = bag.decision(x);
            assert!((f - mean(&m)).abs() < 1e-10);
            let lo = m.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = m.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            assert!(lo - 1e-10 <= f && f <= hi + 1e-10);
        }
    }
}

#[test]
fn contamination_moments_match_theory() {
    let truth: Vec<bool> = (0..200).map(|i| i % 10 < 3).collect();
    let realized = 0.3;
    for (sampling, k) in [(Sampling::WithReplacement, 40), (Sampling::WithoutReplacement, 40)] {
        let n = 4000;
        let draws = contamination_draws(&truth, k, sampling, n, 21);
        let theory = expected_moments(realized, truth.len(), k, sampling);
        let m = mean(&draws);
        let v = std_dev(&draws).powi(2);
        let se_mean = (theory.variance / n as f64).sqrt();
        // standard error of a sample variance, normal approximation
        let se_var = theory.variance * (2.0 / (n - 1) as f64).sqrt();
        assert!((m - theory.mean).abs() < 3.0 * se_mean, "{sampling:?} mean {m}");
        assert!((v - theory.variance).abs() < 3.0 * se_var, "{sampling:?} var {v}");
    }
}

#[test]
fn contamination_draws_follow_the_bagging_subsamples() {
    let (ds, split) = pu_problem(4, 24, 3, 8);
    let cfg = svm_bagging(8, 5, 31);
    let bag = bagging_inductive(&ds, &split, &cfg, &Sequential).unwrap();
    let truth = ds.truth_of(split.unlabeled()).unwrap();
    let draws = contamination_draws(&truth, 8, Sampling::WithoutReplacement, 5, 31);
    for (record, g) in bag.bootstraps.iter().zip(draws) {
        assert_eq!(record.contamination, Some(g));
    }
}

#[test]
fn results_do_not_depend_on_the_executor() {
    let (ds, split) = pu_problem(5, 40, 4, 9);
    let cfg = svm_bagging(10, 12, 4);
    let a = bagging_transductive(&ds, &split, &cfg, &Sequential).unwrap();
    let b = bagging_transductive(&ds, &split, &cfg, &Threads).unwrap();
    let c = bagging_transductive(&ds, &split, &cfg, &Sequential).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, c);
    let i = bagging_inductive(&ds, &split, &cfg, &Sequential).unwrap();
    let j = bagging_inductive(&ds, &split, &cfg, &Threads).unwrap();
    assert_eq!(i, j);
    let other = bagging_transductive(&ds, &split, &cfg.with_seed(5), &Sequential).unwrap();
    assert_ne!(a, other);
}

#[test]
fn mean_similarity_matches_direct_sum() {
    let (pos, items) = blobs(6, 15, 5, 10);
    let sigma = 1.3;
    let p: Vec<&SparseVec> = pos.iter().collect();
    let x: Vec<&SparseVec> = items.iter().collect();
    let scores = mean_similarity_baseline(&p, &x, Kernel::Rbf { sigma });
    for (xi, s) in items.iter().zip(scores) {
        let xd = xi.to_dense(5);
        let direct: f64 = pos
            .iter()
            .map(|pi| {
                let d2: f64 = pi.to_dense(5).iter().zip(&xd).map(|(a, b)| (a - b).powi(2)).sum();
                (-d2 / (2.0 * sigma * sigma)).exp()
            })
            .sum::<f64>()
            / 6.0;
        assert!((s - direct).abs() < 1e-12);
    }
}

#[test]
fn clean_separable_data_is_ranked_perfectly() {
    let sim = SimConfig {
        mean_separation: 8.0,
        n_test: 200,
        ..SimConfig::standard(0.0, 3)
    };
    let data = generate_gaussian_pu(&sim).unwrap();
    let cfg = BaggingConfig::new(Learner::Logit, TrainConfig::logit(1.0))
        .with_subsample_size(5)
        .with_bootstraps(20);
    let bag = bagging_inductive(&data.train, &data.split, &cfg, &Sequential).unwrap();
    let scores: Vec<f64> = data.test.rows().iter().map(|x| bag.decision(x)).collect();
    let truth = data.test.truth_of(&(0..200).collect::<Vec<_>>()).unwrap();
    assert!(auc(&scores, &truth).unwrap() > 0.99);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn exclusion_rule_holds_for_random_configs(
        n_pos in 1usize..6,
        n_unl in 2usize..25,
        k_frac in 0.05f64..1.0,
        t in 1usize..8,
        replace in any::<bool>(),
        vote in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let (ds, split) = pu_problem(n_pos, n_unl.max(4), 2, seed);
        let n_unl = split.unlabeled().len();
        let k = ((k_frac * n_unl as f64).ceil() as usize).clamp(1, n_unl);
        let cfg = svm_bagging(k, t, seed)
            .with_sampling(if replace { Sampling::WithReplacement } else { Sampling::WithoutReplacement })
            .with_aggregation(if vote { Aggregation::MajorityVote } else { Aggregation::Mean });
        audit(&ds, &split, &cfg);
        let score = bagging_transductive(&ds, &split, &cfg, &Sequential).unwrap();
        let seen: BTreeSet<usize> = score.bootstraps.iter().flat_map(|b| b.distinct()).collect();
        for item in &score.items {
            let u = split.unlabeled().iter().position(|&i| i == item.item).unwrap();
            prop_assert!(item.count <= t);
            if !seen.contains(&u) {
                prop_assert_eq!(item.count, t);
            }
        }
    }
}
