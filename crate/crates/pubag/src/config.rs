//! Versioned TOML experiment configuration.
//!
//! ```toml
//! schema_version = 1
//! kind = "sim_sweep"          # sim_sweep | k_sweep | t_sweep | method_compare | timing
//! seed = 42
//! replicates = 50
//! output = "results.jsonl"    # optional; stdout when absent
//!
//! [data]
//! source = "synthetic"        # or "files" with [[data.tasks]] entries
//! contamination = 0.2
//!
//! [sweep]
//! contamination = [0.0, 0.2, 0.4]
//! subsample_sizes = [5, 10, 20]
//!
//! [[methods]]
//! id = "bagging"
//! method = "bagging"          # bagging | bagging1 | bagging5 | biased | mean_similarity
//! learner = "logit"
//! c = 0.1
//! bootstraps = 200
//! ```

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use pubag_core::classifiers::{CostRule, Kernel, Learner, TrainConfig};
use pubag_core::data::SimConfig;
use pubag_core::pu::{Aggregation, BaggingConfig, Sampling};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    SimSweep,
    KSweep,
    TSweep,
    MethodCompare,
    Timing,
}

impl ExperimentKind {
    pub fn verb(self) -> &'static str {
        match self {
            ExperimentKind::SimSweep => "sim-sweep",
            ExperimentKind::KSweep => "k-sweep",
            ExperimentKind::TSweep => "t-sweep",
            ExperimentKind::MethodCompare => "compare",
            ExperimentKind::Timing => "timing",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub kind: ExperimentKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub replicates: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Run replicates and bootstraps on the thread pool.
    #[serde(default = "yes")]
    pub parallel: bool,
    pub data: DataSource,
    #[serde(default)]
    pub sweep: SweepGrid,
    pub methods: Vec<MethodSpec>,
    #[serde(default)]
    pub timing: TimingOptions,
}

fn one() -> usize {
    1
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSource {
    Synthetic(SimSpec),
    Files { tasks: Vec<TaskFile> },
}

/// Simulation parameters; any field left out takes the standard value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSpec {
    pub dim: usize,
    pub std: f64,
    pub mean_separation: f64,
    pub contamination: f64,
    pub n_pos: usize,
    pub n_unlabeled: usize,
    pub n_test: usize,
    pub test_pos_fraction: f64,
}

impl Default for SimSpec {
    fn default() -> Self {
        let s = SimConfig::standard(0.0, 0);
        SimSpec {
            dim: s.dim,
            std: s.std,
            mean_separation: s.mean_separation,
            contamination: s.contamination,
            n_pos: s.n_pos,
            n_unlabeled: s.n_unlabeled,
            n_test: s.n_test,
            test_pos_fraction: s.test_pos_fraction,
        }
    }
}

impl SimSpec {
    pub fn to_config(&self, contamination: f64, seed: u64) -> SimConfig {
        SimConfig {
            dim: self.dim,
            std: self.std,
            mean_separation: self.mean_separation,
            contamination,
            n_pos: self.n_pos,
            n_unlabeled: self.n_unlabeled,
            n_test: self.n_test,
            test_pos_fraction: self.test_pos_fraction,
            seed,
        }
    }
}

/// A labeled svmlight file; positives are hidden at random to form `P` and `U`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskFile {
    pub name: String,
    pub path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub groups: Option<PathBuf>,
}

/// Grid axes. Empty lists fall back to the data or method settings.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepGrid {
    pub contamination: Vec<f64>,
    pub subsample_sizes: Vec<usize>,
    pub bootstraps: Vec<usize>,
    /// Sizes of `P` drawn from labeled files.
    pub n_positives: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodKind {
    Bagging,
    /// Bagging with `K = |P|`.
    Bagging1,
    /// Bagging with `K = 5 |P|`.
    Bagging5,
    Biased,
    MeanSimilarity,
}

impl MethodKind {
    pub fn is_bagging(self) -> bool {
        matches!(
            self,
            MethodKind::Bagging | MethodKind::Bagging1 | MethodKind::Bagging5
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodSpec {
    pub id: String,
    pub method: MethodKind,
    #[serde(default = "default_learner")]
    pub learner: Learner,
    #[serde(default = "default_c")]
    pub c: f64,
    #[serde(default = "default_kernel")]
    pub kernel: Kernel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<usize>,
    /// `K`; defaults to `|P|` (or the preset).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subsample_size: Option<usize>,
    /// `T`; defaults to the `K`-dependent rule.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bootstraps: Option<usize>,
    #[serde(default = "default_sampling")]
    pub sampling: Sampling,
    #[serde(default = "default_aggregation")]
    pub aggregation: Aggregation,
    /// Choose `C` by grouped cross-validation over `c_grid`.
    #[serde(default)]
    pub grid_search: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_grid: Option<Vec<f64>>,
    #[serde(default = "default_folds")]
    pub cv_folds: usize,
}

fn default_learner() -> Learner {
    Learner::Svm
}

fn default_c() -> f64 {
    1.0
}

fn default_kernel() -> Kernel {
    Kernel::Linear
}

fn default_sampling() -> Sampling {
    Sampling::WithoutReplacement
}

fn default_aggregation() -> Aggregation {
    Aggregation::Mean
}

fn default_folds() -> usize {
    3
}

impl MethodSpec {
    pub fn new(id: &str, method: MethodKind, learner: Learner, c: f64) -> Self {
        MethodSpec {
            id: id.into(),
            method,
            learner,
            c,
            kernel: Kernel::Linear,
            tolerance: None,
            max_iterations: None,
            subsample_size: None,
            bootstraps: None,
            sampling: Sampling::WithoutReplacement,
            aggregation: Aggregation::Mean,
            grid_search: false,
            c_grid: None,
            cv_folds: 3,
        }
    }

    pub fn train_config(&self, c: f64) -> TrainConfig {
        let mut cfg = TrainConfig::for_learner(self.learner, c).with_kernel(self.kernel);
        cfg.costs = CostRule::Balanced;
        if let Some(tol) = self.tolerance {
            cfg.tolerance = tol;
        }
        if let Some(it) = self.max_iterations {
            cfg.max_iterations = it;
        }
        cfg
    }

    /// `K` for a given `|P|`, unless a sweep overrides it.
    pub fn subsample_size(&self, n_pos: usize) -> usize {
        match self.method {
            MethodKind::Bagging1 => n_pos,
            MethodKind::Bagging5 => 5 * n_pos,
            _ => self.subsample_size.unwrap_or(n_pos),
        }
    }

    pub fn bagging_config(&self, c: f64, k: usize, t: Option<usize>, seed: u64) -> BaggingConfig {
        let cfg = BaggingConfig::new(self.learner, self.train_config(c))
            .with_subsample_size(k)
            .with_sampling(self.sampling)
            .with_aggregation(self.aggregation)
            .with_seed(seed);
        match t.or(self.bootstraps) {
            Some(t) => cfg.with_bootstraps(t),
            None => cfg,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimingOptions {
    /// Exponents for the predicted speedup threshold.
    pub alphas: Vec<f64>,
    /// Fit bootstraps on the thread pool while timing.
    pub parallel_bootstraps: bool,
}

impl Default for TimingOptions {
    fn default() -> Self {
        TimingOptions {
            alphas: vec![2.0, 3.0],
            parallel_bootstraps: false,
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub replicates: Option<usize>,
    pub parallel: Option<bool>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))
    }

    /// Reads a config; relative data paths are resolved against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml(&text).map_err(|e| e.in_file(path))?;
        if let (Some(dir), DataSource::Files { tasks }) = (path.parent(), &mut cfg.data) {
            for task in tasks {
                task.path = dir.join(&task.path);
                if let Some(g) = &mut task.groups {
                    *g = dir.join(&*g);
                }
            }
        }
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if let Some(out) = &o.output {
            self.output = Some(out.clone());
        }
        if let Some(r) = o.replicates {
            self.replicates = r;
        }
        if let Some(p) = o.parallel {
            self.parallel = p;
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        if self.replicates == 0 {
            return bad("replicates must be at least 1".into());
        }
        if self.methods.is_empty() {
            return bad("at least one method is required".into());
        }
        let mut ids = BTreeSet::new();
        for m in &self.methods {
            if !ids.insert(m.id.as_str()) {
                return bad(format!("duplicate method id {:?}", m.id));
            }
            m.train_config(m.c).validate()?;
            if m.grid_search && m.cv_folds < 2 {
                return bad(format!("method {}: cv_folds must be at least 2", m.id));
            }
            if m.c_grid.as_ref().is_some_and(|g| g.is_empty()) {
                return bad(format!("method {}: empty c_grid", m.id));
            }
        }
        match &self.data {
            DataSource::Synthetic(spec) => {
                for &g in self.sweep.contamination.iter().chain([&spec.contamination]) {
                    spec.to_config(g, 0).validate()?;
                }
            }
            DataSource::Files { tasks } => {
                if tasks.is_empty() {
                    return bad("no data tasks".into());
                }
                if self.kind == ExperimentKind::SimSweep {
                    return bad("sim_sweep needs synthetic data".into());
                }
                if self.sweep.n_positives.is_empty() {
                    return bad("file data needs sweep.n_positives".into());
                }
                for t in tasks {
                    for p in std::iter::once(&t.path).chain(&t.groups) {
                        if !p.is_file() {
                            return bad(format!("file not found: {}", p.display()));
                        }
                    }
                }
            }
        }
        if self.sweep.n_positives.contains(&0) || self.sweep.subsample_sizes.contains(&0) {
            return bad("sweep sizes must be positive".into());
        }
        if self.sweep.bootstraps.contains(&0) {
            return bad("sweep.bootstraps must be positive".into());
        }
        Ok(())
    }

    /// SHA-256 over the canonical JSON form. The output path and the
    /// parallelism switches do not change results and are left out.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output = None;
        canonical.parallel = true;
        canonical.timing.parallel_bootstraps = false;
        let json = serde_json::to_string(&canonical).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}
