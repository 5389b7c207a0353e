//! Sparse datasets, PU splits and the Gaussian PU simulator.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::index;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    pub fn sign(self) -> f64 {
        match self {
            Label::Positive => 1.0,
            Label::Negative => -1.0,
        }
    }

    pub fn is_positive(self) -> bool {
        self == Label::Positive
    }
}

/// A sparse feature vector: `(feature_index, value)` pairs with strictly
/// increasing, 0-based indices.
#[derive(Clone, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct SparseVec {
    entries: Vec<(u32, f64)>,
}

impl SparseVec {
    pub fn new(entries: Vec<(u32, f64)>) -> Result<Self> {
        if let Some(w) = entries.windows(2).find(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidDataset(format!(
                "feature indices not strictly increasing ({} then {})",
                w[0].0, w[1].0
            )));
        }
        Ok(SparseVec { entries })
    }

    /// Stores every coordinate, zeros included.
    pub fn from_dense(values: &[f64]) -> Self {
        SparseVec {
            entries: values
                .iter()
                .enumerate()
                .map(|(i, &v)| (i as u32, v))
                .collect(),
        }
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// One past the largest feature index, i.e. the dimension this vector needs.
    pub fn dim(&self) -> usize {
        self.entries.last().map_or(0, |&(i, _)| i as usize + 1)
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|&(_, v)| v.is_finite())
    }

    pub fn norm_sq(&self) -> f64 {
        self.entries.iter().map(|&(_, v)| v * v).sum()
    }

    /// Dot product with a dense vector; coordinates beyond `dense.len()` count as zero.
    pub fn dot_dense(&self, dense: &[f64]) -> f64 {
        self.entries
            .iter()
            .filter_map(|&(i, v)| dense.get(i as usize).map(|w| w * v))
            .sum()
    }

    /// `dense += scale * self`. `dense` must cover every index of `self`.
    pub fn axpy_into(&self, scale: f64, dense: &mut [f64]) {
        for &(i, v) in &self.entries {
            dense[i as usize] += scale * v;
        }
    }

    pub fn dot(&self, other: &SparseVec) -> f64 {
        let (a, b) = (&self.entries, &other.entries);
        let (mut i, mut j, mut acc) = (0, 0, 0.0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                core::cmp::Ordering::Less => i += 1,
                core::cmp::Ordering::Greater => j += 1,
                core::cmp::Ordering::Equal => {
                    acc += a[i].1 * b[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    pub fn dist_sq(&self, other: &SparseVec) -> f64 {
        (self.norm_sq() + other.norm_sq() - 2.0 * self.dot(other)).max(0.0)
    }

    pub fn to_dense(&self, dim: usize) -> Vec<f64> {
        let mut out = alloc::vec![0.0; dim.max(self.dim())];
        self.axpy_into(1.0, &mut out);
        out
    }
}

/// Items with sparse features, optional ground truth and optional group tags.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Dataset {
    n_features: usize,
    rows: Vec<SparseVec>,
    labels: Option<Vec<Option<Label>>>,
    groups: Option<Vec<String>>,
}

impl Dataset {
    /// Builds a dataset; `n_features` is raised to cover every row if needed.
    pub fn new(n_features: usize, rows: Vec<SparseVec>) -> Self {
        let n_features = rows.iter().map(SparseVec::dim).fold(n_features, usize::max);
        Dataset {
            n_features,
            rows,
            labels: None,
            groups: None,
        }
    }

    /// Attaches per-item truth; `None` marks an item whose truth is unknown.
    pub fn with_labels(mut self, labels: Vec<Option<Label>>) -> Result<Self> {
        if labels.len() != self.rows.len() {
            return Err(Error::InvalidDataset(format!(
                "{} labels for {} rows",
                labels.len(),
                self.rows.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn with_groups(mut self, groups: Vec<String>) -> Result<Self> {
        if groups.len() != self.rows.len() {
            return Err(Error::InvalidDataset(format!(
                "{} group tags for {} rows",
                groups.len(),
                self.rows.len()
            )));
        }
        self.groups = Some(groups);
        Ok(self)
    }

    pub fn n_items(&self) -> usize {
        self.rows.len()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &SparseVec {
        &self.rows[i]
    }

    pub fn labels(&self) -> Option<&[Option<Label>]> {
        self.labels.as_deref()
    }

    pub fn label(&self, i: usize) -> Option<Label> {
        self.labels.as_ref().and_then(|l| l[i])
    }

    pub fn groups(&self) -> Option<&[String]> {
        self.groups.as_deref()
    }

    /// Indices of items whose truth is positive.
    pub fn true_positives(&self) -> Vec<usize> {
        (0..self.n_items())
            .filter(|&i| self.label(i) == Some(Label::Positive))
            .collect()
    }

    pub fn select(&self, indices: &[usize]) -> Vec<&SparseVec> {
        indices.iter().map(|&i| &self.rows[i]).collect()
    }

    /// Truth of the given items as booleans; `None` if any of them is unknown.
    pub fn truth_of(&self, indices: &[usize]) -> Option<Vec<bool>> {
        indices
            .iter()
            .map(|&i| self.label(i).map(Label::is_positive))
            .collect()
    }
}

/// Known positives `P` and unlabeled items `U`, as indices into a [`Dataset`].
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PuSplit {
    positives: Vec<usize>,
    unlabeled: Vec<usize>,
}

impl PuSplit {
    pub fn new(positives: Vec<usize>, unlabeled: Vec<usize>, n_items: usize) -> Result<Self> {
        if positives.is_empty() || unlabeled.is_empty() {
            return Err(Error::InvalidDataset(
                "a PU split needs at least one positive and one unlabeled item".into(),
            ));
        }
        let mut seen = alloc::vec![false; n_items];
        for &i in positives.iter().chain(&unlabeled) {
            if i >= n_items {
                return Err(Error::InvalidDataset(format!(
                    "item {i} out of range for {n_items} items"
                )));
            }
            if core::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidDataset(format!(
                    "item {i} appears twice in the PU split"
                )));
            }
        }
        Ok(PuSplit {
            positives,
            unlabeled,
        })
    }

    pub fn positives(&self) -> &[usize] {
        &self.positives
    }

    pub fn unlabeled(&self) -> &[usize] {
        &self.unlabeled
    }

    /// Realized contamination of `U`, when the truth of every unlabeled item is known.
    pub fn contamination(&self, ds: &Dataset) -> Option<f64> {
        let truth = ds.truth_of(&self.unlabeled)?;
        Some(truth.iter().filter(|&&t| t).count() as f64 / truth.len() as f64)
    }
}

/// Draws `n_known_pos` of the true positives as `P`; everything else becomes `U`.
pub fn make_pu_split(ds: &Dataset, n_known_pos: usize, seed: u64) -> Result<PuSplit> {
    if ds.labels().is_none() {
        return Err(Error::InvalidDataset(
            "a PU split needs ground-truth labels".into(),
        ));
    }
    if n_known_pos == 0 {
        return Err(Error::InvalidConfig("n_known_pos must be at least 1".into()));
    }
    let truth_pos = ds.true_positives();
    if n_known_pos > truth_pos.len() {
        return Err(Error::NotEnoughPositives {
            requested: n_known_pos,
            available: truth_pos.len(),
        });
    }
    let mut rng = rng::seeded(seed);
    let mut positives: Vec<usize> = index::sample(&mut rng, truth_pos.len(), n_known_pos)
        .into_iter()
        .map(|k| truth_pos[k])
        .collect();
    positives.sort_unstable();
    let mut known = alloc::vec![false; ds.n_items()];
    for &p in &positives {
        known[p] = true;
    }
    let unlabeled = (0..ds.n_items()).filter(|&i| !known[i]).collect();
    PuSplit::new(positives, unlabeled, ds.n_items())
}

/// Two isotropic Gaussian classes with a contaminated unlabeled pool.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimConfig {
    pub dim: usize,
    /// Per-coordinate standard deviation of both classes.
    pub std: f64,
    /// Norm of the negative-class mean; the positive class is centered at 0.
    pub mean_separation: f64,
    /// Probability that an unlabeled item is a hidden positive.
    pub contamination: f64,
    pub n_pos: usize,
    pub n_unlabeled: usize,
    pub n_test: usize,
    pub test_pos_fraction: f64,
    pub seed: u64,
}

impl SimConfig {
    /// The simulated-data setup: 50 dimensions, standard deviation 0.6, unit mean
    /// separation, 5 positives, 50 unlabeled and a balanced test set of 1000.
    pub fn standard(contamination: f64, seed: u64) -> Self {
        SimConfig {
            dim: 50,
            std: 0.6,
            mean_separation: 1.0,
            contamination,
            n_pos: 5,
            n_unlabeled: 50,
            n_test: 1000,
            test_pos_fraction: 0.5,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.into()));
        if !(0.0..1.0).contains(&self.contamination) {
            return bad("contamination must lie in [0, 1)");
        }
        if !(self.std > 0.0 && self.std.is_finite()) {
            return bad("std must be positive");
        }
        if !(self.mean_separation >= 0.0 && self.mean_separation.is_finite()) {
            return bad("mean_separation must be nonnegative");
        }
        if self.dim == 0 || self.n_pos == 0 || self.n_unlabeled == 0 || self.n_test == 0 {
            return bad("dim and all counts must be at least 1");
        }
        if !(self.test_pos_fraction > 0.0 && self.test_pos_fraction < 1.0) {
            return bad("test_pos_fraction must lie in (0, 1)");
        }
        Ok(())
    }
}

/// Output of [`generate_gaussian_pu`]. In `train` the first `n_pos` rows are the
/// known positives and the rest form `U`, with the hidden truth recorded.
#[derive(Clone, Debug, PartialEq)]
pub struct SimData {
    pub train: Dataset,
    pub split: PuSplit,
    pub test: Dataset,
}

pub fn generate_gaussian_pu(cfg: &SimConfig) -> Result<SimData> {
    cfg.validate()?;
    let mut rng = rng::seeded(cfg.seed);
    // Negative mean sits on the first axis.
    let draw = |label: Label, rng: &mut rng::Rng| {
        let values: Vec<f64> = (0..cfg.dim)
            .map(|j| {
                let z: f64 = StandardNormal.sample(rng);
                let mean = if label == Label::Negative && j == 0 {
                    cfg.mean_separation
                } else {
                    0.0
                };
                mean + cfg.std * z
            })
            .collect();
        SparseVec::from_dense(&values)
    };

    let n_train = cfg.n_pos + cfg.n_unlabeled;
    let mut rows = Vec::with_capacity(n_train);
    let mut labels = Vec::with_capacity(n_train);
    for _ in 0..cfg.n_pos {
        rows.push(draw(Label::Positive, &mut rng));
        labels.push(Some(Label::Positive));
    }
    for _ in 0..cfg.n_unlabeled {
        let label = if rng.random::<f64>() < cfg.contamination {
            Label::Positive
        } else {
            Label::Negative
        };
        rows.push(draw(label, &mut rng));
        labels.push(Some(label));
    }
    let train = Dataset::new(cfg.dim, rows).with_labels(labels)?;
    let split = PuSplit::new(
        (0..cfg.n_pos).collect(),
        (cfg.n_pos..n_train).collect(),
        n_train,
    )?;

    let n_test_pos = libm::floor(cfg.test_pos_fraction * cfg.n_test as f64) as usize;
    let mut rows = Vec::with_capacity(cfg.n_test);
    let mut labels = Vec::with_capacity(cfg.n_test);
    for i in 0..cfg.n_test {
        let label = if i < n_test_pos {
            Label::Positive
        } else {
            Label::Negative
        };
        rows.push(draw(label, &mut rng));
        labels.push(Some(label));
    }
    let test = Dataset::new(cfg.dim, rows).with_labels(labels)?;
    Ok(SimData { train, split, test })
}
