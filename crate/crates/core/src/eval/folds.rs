use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::rng;

/// Fold assignment of every item; folds never split a group.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FoldPlan {
    pub k: usize,
    pub assignments: Vec<usize>,
    /// Whether items were grouped by tag rather than folded one by one.
    pub grouped: bool,
}

impl FoldPlan {
    pub fn test_items(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] == fold)
            .collect()
    }

    pub fn train_items(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] != fold)
            .collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignments {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Folds over the items of `ds`, keeping each group tag in one fold. Without
/// group tags every item is its own group.
pub fn grouped_kfold(ds: &Dataset, k: usize, seed: u64) -> Result<FoldPlan> {
    match ds.groups() {
        Some(groups) => kfold_by_key(groups, k, seed).map(|plan| FoldPlan {
            grouped: true,
            ..plan
        }),
        None => {
            let keys: Vec<usize> = (0..ds.n_items()).collect();
            kfold_by_key(&keys, k, seed).map(|plan| FoldPlan {
                grouped: false,
                ..plan
            })
        }
    }
}

/// Folds over items identified by their group keys.
///
/// Groups are shuffled, then taken largest first (stable, so the shuffle breaks
/// size ties) and each is placed in the currently smallest fold, lowest index
/// first on ties.
pub fn kfold_by_key<G: Ord>(keys: &[G], k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::InvalidConfig("fold count must be at least 2".into()));
    }
    let mut members: BTreeMap<&G, Vec<usize>> = BTreeMap::new();
    for (i, key) in keys.iter().enumerate() {
        members.entry(key).or_default().push(i);
    }
    if members.len() < k {
        return Err(Error::TooFewGroups {
            groups: members.len(),
            folds: k,
        });
    }
    let mut groups: Vec<Vec<usize>> = members.into_values().collect();
    groups.shuffle(&mut rng::seeded(seed));
    groups.sort_by(|a, b| b.len().cmp(&a.len()));

    let mut sizes = vec![0usize; k];
    let mut assignments = vec![0usize; keys.len()];
    for group in &groups {
        let fold = (0..k).min_by_key(|&f| (sizes[f], f)).unwrap_or(0);
        sizes[fold] += group.len();
        for &i in group {
            assignments[i] = fold;
        }
    }
    Ok(FoldPlan {
        k,
        assignments,
        grouped: true,
    })
}
