//! Weighted binary base learners.
//!
//! Both learners fit a bias by augmenting every example with a constant feature
//! of value 1, so the bias is regularized together with the weights.

mod logit;
mod svm;

use alloc::vec::Vec;

pub use logit::{train_logit, LogisticObjective};
pub use svm::{fit_svm, train_svm, SolverPath, SvmFit};

use crate::data::SparseVec;
use crate::error::{Error, Result};

pub const DEFAULT_SVM_TOLERANCE: f64 = 1e-3;
pub const DEFAULT_LOGIT_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_MAX_ITERATIONS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "type", rename_all = "lowercase"))]
pub enum Kernel {
    Linear,
    /// `k(x, x') = exp(-|x - x'|^2 / (2 sigma^2))`.
    Rbf { sigma: f64 },
}

impl Kernel {
    pub fn eval(&self, a: &SparseVec, b: &SparseVec) -> f64 {
        match *self {
            Kernel::Linear => a.dot(b),
            Kernel::Rbf { sigma } => libm::exp(-a.dist_sq(b) / (2.0 * sigma * sigma)),
        }
    }
}

/// How the total cost `C` is split between the two classes.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "type", rename_all = "lowercase"))]
pub enum CostRule {
    /// Equal total penalty per class: `C+ n+ = C- n-` with `C+ + C- = C`.
    Balanced,
    Explicit { positive: f64, negative: f64 },
}

impl CostRule {
    /// Per-example costs `(C+, C-)` for the given class sizes.
    pub fn resolve(&self, c: f64, n_pos: usize, n_neg: usize) -> (f64, f64) {
        match *self {
            CostRule::Balanced => {
                let n = (n_pos + n_neg) as f64;
                (c * n_neg as f64 / n, c * n_pos as f64 / n)
            }
            CostRule::Explicit { positive, negative } => (positive, negative),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainConfig {
    /// Total cost `C = C+ + C-` under the balanced rule.
    pub c: f64,
    pub costs: CostRule,
    pub kernel: Kernel,
    /// SVM: largest projected-gradient violation. Logistic: gradient max-norm.
    pub tolerance: f64,
    /// Epochs for the SVM, Newton steps for the logistic regression.
    pub max_iterations: usize,
    /// Seeds the per-epoch permutation of the SVM solver.
    pub seed: u64,
}

impl TrainConfig {
    pub fn svm(c: f64) -> Self {
        TrainConfig {
            c,
            costs: CostRule::Balanced,
            kernel: Kernel::Linear,
            tolerance: DEFAULT_SVM_TOLERANCE,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            seed: 0,
        }
    }

    pub fn logit(c: f64) -> Self {
        TrainConfig {
            tolerance: DEFAULT_LOGIT_TOLERANCE,
            ..Self::svm(c)
        }
    }

    pub fn for_learner(learner: Learner, c: f64) -> Self {
        match learner {
            Learner::Svm => Self::svm(c),
            Learner::Logit => Self::logit(c),
        }
    }

    pub fn with_kernel(self, kernel: Kernel) -> Self {
        TrainConfig { kernel, ..self }
    }

    pub fn with_tolerance(self, tolerance: f64) -> Self {
        TrainConfig { tolerance, ..self }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        TrainConfig { seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x > 0.0 && x.is_finite();
        if !positive(self.c) {
            return Err(Error::InvalidConfig("C must be positive".into()));
        }
        if let CostRule::Explicit { positive: p, negative: n } = self.costs {
            if !positive(p) || !positive(n) {
                return Err(Error::InvalidConfig("class costs must be positive".into()));
            }
        }
        if let Kernel::Rbf { sigma } = self.kernel {
            if !positive(sigma) {
                return Err(Error::InvalidConfig("RBF width must be positive".into()));
            }
        }
        if !positive(self.tolerance) {
            return Err(Error::InvalidConfig("tolerance must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self::svm(1.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Learner {
    Svm,
    Logit,
}

/// Trains the requested learner on `pos` (label +1) against `neg` (label -1).
pub fn train(
    learner: Learner,
    pos: &[&SparseVec],
    neg: &[&SparseVec],
    cfg: &TrainConfig,
) -> Result<WeightedClassifier> {
    match learner {
        Learner::Svm => train_svm(pos, neg, cfg),
        Learner::Logit => train_logit(pos, neg, cfg),
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "type", rename_all = "lowercase"))]
pub enum DecisionModel {
    /// `w . x + bias`; features beyond `weights.len()` carry zero weight.
    Linear { weights: Vec<f64>, bias: f64 },
    /// `sum_i coefficients[i] * k(support[i], x) + bias`, with `coefficients[i] = alpha_i y_i`.
    Expansion {
        kernel: Kernel,
        support: Vec<SparseVec>,
        coefficients: Vec<f64>,
        bias: f64,
    },
}

#[derive(Clone, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainDiagnostics {
    pub iterations: usize,
    /// Final KKT violation (SVM) or gradient max-norm (logistic).
    pub violation: f64,
    pub converged: bool,
    /// SVM: dual objective. Logistic: primal objective.
    pub objective: f64,
    /// Logistic objective after every accepted Newton step, starting at `w = 0`.
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Vec::is_empty"))]
    pub objective_history: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WeightedClassifier {
    pub kind: Learner,
    pub model: DecisionModel,
    pub config: TrainConfig,
    pub diagnostics: TrainDiagnostics,
}

impl WeightedClassifier {
    pub fn decision(&self, x: &SparseVec) -> f64 {
        self.model.decision(x)
    }
}

impl DecisionModel {
    pub fn decision(&self, x: &SparseVec) -> f64 {
        match self {
            DecisionModel::Linear { weights, bias } => x.dot_dense(weights) + bias,
            DecisionModel::Expansion {
                kernel,
                support,
                coefficients,
                bias,
            } => {
                support
                    .iter()
                    .zip(coefficients)
                    .map(|(s, a)| a * kernel.eval(s, x))
                    .sum::<f64>()
                    + bias
            }
        }
    }

    pub fn bias(&self) -> f64 {
        match self {
            DecisionModel::Linear { bias, .. } | DecisionModel::Expansion { bias, .. } => *bias,
        }
    }
}

fn check_classes(pos: &[&SparseVec], neg: &[&SparseVec]) -> Result<()> {
    if pos.is_empty() {
        return Err(Error::EmptyClass("positive"));
    }
    if neg.is_empty() {
        return Err(Error::EmptyClass("negative"));
    }
    if let Some(i) = pos.iter().chain(neg).position(|x| !x.is_finite()) {
        return Err(Error::NonFiniteFeature(i));
    }
    Ok(())
}
