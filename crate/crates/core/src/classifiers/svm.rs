//! Asymmetric-cost L1-hinge SVM solved by dual coordinate descent.
//!
//! With the bias folded into an augmented constant feature the dual is
//!
//! ```text
//! min_a  1/2 a'Qa - sum(a)   s.t.  0 <= a_i <= C_i,   Q_ij = y_i y_j (k(x_i, x_j) + 1)
//! ```
//!
//! Each epoch visits the examples in a fresh random order and minimizes exactly
//! along one coordinate at a time. The solver stops once the largest projected
//! gradient of the current iterate is at most the tolerance.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use super::{
    check_classes, DecisionModel, Kernel, Learner, TrainConfig, TrainDiagnostics,
    WeightedClassifier,
};
use crate::data::SparseVec;
use crate::error::{Error, Result};
use crate::rng;

/// Largest problem for which the full kernel matrix is cached.
const FULL_GRAM_LIMIT: usize = 6000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverPath {
    /// Maintains the primal weight vector; linear kernel only.
    PrimalWeights,
    /// Maintains the dual gradient through kernel rows; any kernel.
    KernelExpansion,
}

/// A trained SVM together with its dual solution. `alpha` and `upper_bounds`
/// list the positives first, then the negatives, in input order.
#[derive(Clone, Debug)]
pub struct SvmFit {
    pub classifier: WeightedClassifier,
    pub alpha: Vec<f64>,
    pub upper_bounds: Vec<f64>,
}

/// Trains on `pos` against `neg`, using the primal-weight path for the linear kernel.
pub fn train_svm(
    pos: &[&SparseVec],
    neg: &[&SparseVec],
    cfg: &TrainConfig,
) -> Result<WeightedClassifier> {
    let path = match cfg.kernel {
        Kernel::Linear => SolverPath::PrimalWeights,
        Kernel::Rbf { .. } => SolverPath::KernelExpansion,
    };
    fit_svm(pos, neg, cfg, path).map(|fit| fit.classifier)
}

pub fn fit_svm(
    pos: &[&SparseVec],
    neg: &[&SparseVec],
    cfg: &TrainConfig,
    path: SolverPath,
) -> Result<SvmFit> {
    cfg.validate()?;
    check_classes(pos, neg)?;
    let (c_pos, c_neg) = cfg.costs.resolve(cfg.c, pos.len(), neg.len());
    let examples: Vec<&SparseVec> = pos.iter().chain(neg).copied().collect();
    let y: Vec<f64> = (0..examples.len())
        .map(|i| if i < pos.len() { 1.0 } else { -1.0 })
        .collect();
    let upper: Vec<f64> = y
        .iter()
        .map(|&yi| if yi > 0.0 { c_pos } else { c_neg })
        .collect();
    let problem = Problem {
        examples: &examples,
        y: &y,
        upper: &upper,
        cfg,
    };
    let (model, alpha, diagnostics) = match path {
        SolverPath::PrimalWeights => {
            if cfg.kernel != Kernel::Linear {
                return Err(Error::Unsupported(
                    "the primal-weight path needs the linear kernel",
                ));
            }
            problem.solve_linear()
        }
        SolverPath::KernelExpansion => problem.solve_kernel(),
    };
    Ok(SvmFit {
        classifier: WeightedClassifier {
            kind: Learner::Svm,
            model,
            config: *cfg,
            diagnostics,
        },
        alpha,
        upper_bounds: upper,
    })
}

struct Problem<'a> {
    examples: &'a [&'a SparseVec],
    y: &'a [f64],
    upper: &'a [f64],
    cfg: &'a TrainConfig,
}

fn projected(g: f64, alpha: f64, upper: f64) -> f64 {
    if alpha <= 0.0 {
        g.min(0.0)
    } else if alpha >= upper {
        g.max(0.0)
    } else {
        g
    }
}

impl Problem<'_> {
    fn n(&self) -> usize {
        self.examples.len()
    }

    fn solve_linear(&self) -> (DecisionModel, Vec<f64>, TrainDiagnostics) {
        let n = self.n();
        let dim = self.examples.iter().map(|x| x.dim()).max().unwrap_or(0);
        let mut w = vec![0.0; dim];
        let mut b = 0.0;
        let mut alpha = vec![0.0; n];
        let diag: Vec<f64> = self.examples.iter().map(|x| x.norm_sq() + 1.0).collect();
        let mut order: Vec<usize> = (0..n).collect();
        let mut rng = rng::seeded(self.cfg.seed);

        let gradient = |i: usize, w: &[f64], b: f64| {
            self.y[i] * (self.examples[i].dot_dense(w) + b) - 1.0
        };
        let violation = |alpha: &[f64], w: &[f64], b: f64| {
            (0..n)
                .map(|i| projected(gradient(i, w, b), alpha[i], self.upper[i]).abs())
                .fold(0.0, f64::max)
        };

        let mut epochs = 0;
        let mut converged = false;
        let mut final_violation = f64::INFINITY;
        while epochs < self.cfg.max_iterations {
            epochs += 1;
            order.shuffle(&mut rng);
            let mut max_seen: f64 = 0.0;
            for &i in &order {
                let g = gradient(i, &w, b);
                let pg = projected(g, alpha[i], self.upper[i]);
                max_seen = max_seen.max(pg.abs());
                if pg == 0.0 {
                    continue;
                }
                let updated = (alpha[i] - g / diag[i]).clamp(0.0, self.upper[i]);
                let step = (updated - alpha[i]) * self.y[i];
                if step != 0.0 {
                    self.examples[i].axpy_into(step, &mut w);
                    b += step;
                    alpha[i] = updated;
                }
            }
            if max_seen <= self.cfg.tolerance {
                final_violation = violation(&alpha, &w, b);
                if final_violation <= self.cfg.tolerance {
                    converged = true;
                    break;
                }
            }
        }
        if !converged {
            final_violation = violation(&alpha, &w, b);
        }
        let norm_sq: f64 = w.iter().map(|v| v * v).sum::<f64>() + b * b;
        let objective = alpha.iter().sum::<f64>() - 0.5 * norm_sq;
        let diagnostics = TrainDiagnostics {
            iterations: epochs,
            violation: final_violation,
            converged,
            objective,
            objective_history: Vec::new(),
        };
        (DecisionModel::Linear { weights: w, bias: b }, alpha, diagnostics)
    }

    fn solve_kernel(&self) -> (DecisionModel, Vec<f64>, TrainDiagnostics) {
        let n = self.n();
        let kernel = self.cfg.kernel;
        let gram = Gram::new(self.examples, kernel);
        let mut alpha = vec![0.0; n];
        // grad = Q alpha - 1
        let mut grad = vec![-1.0; n];
        let mut row = vec![0.0; n];
        let mut order: Vec<usize> = (0..n).collect();
        let mut rng = rng::seeded(self.cfg.seed);

        let violation = |alpha: &[f64], grad: &[f64]| {
            (0..n)
                .map(|i| projected(grad[i], alpha[i], self.upper[i]).abs())
                .fold(0.0, f64::max)
        };

        let mut epochs = 0;
        let mut converged = false;
        while epochs < self.cfg.max_iterations {
            epochs += 1;
            order.shuffle(&mut rng);
            for &i in &order {
                let g = grad[i];
                if projected(g, alpha[i], self.upper[i]) == 0.0 {
                    continue;
                }
                let q_ii = gram.get(i, i) + 1.0;
                let updated = (alpha[i] - g / q_ii).clamp(0.0, self.upper[i]);
                let delta = updated - alpha[i];
                if delta == 0.0 {
                    continue;
                }
                alpha[i] = updated;
                gram.row(i, &mut row);
                let scale = delta * self.y[i];
                for (j, gj) in grad.iter_mut().enumerate() {
                    *gj += scale * self.y[j] * (row[j] + 1.0);
                }
            }
            if violation(&alpha, &grad) <= self.cfg.tolerance {
                converged = true;
                break;
            }
        }
        let final_violation = violation(&alpha, &grad);
        // a'Qa = sum_i a_i (grad_i + 1)
        let quad: f64 = alpha.iter().zip(&grad).map(|(a, g)| a * (g + 1.0)).sum();
        let objective = alpha.iter().sum::<f64>() - 0.5 * quad;

        let mut support = Vec::new();
        let mut coefficients = Vec::new();
        let mut bias = 0.0;
        for i in 0..n {
            if alpha[i] > 0.0 {
                support.push(self.examples[i].clone());
                coefficients.push(alpha[i] * self.y[i]);
                bias += alpha[i] * self.y[i];
            }
        }
        let diagnostics = TrainDiagnostics {
            iterations: epochs,
            violation: final_violation,
            converged,
            objective,
            objective_history: Vec::new(),
        };
        let model = DecisionModel::Expansion {
            kernel,
            support,
            coefficients,
            bias,
        };
        (model, alpha, diagnostics)
    }
}

/// Kernel matrix, cached in full for small problems and computed row by row otherwise.
struct Gram<'a> {
    examples: &'a [&'a SparseVec],
    kernel: Kernel,
    norms: Vec<f64>,
    full: Option<Vec<f64>>,
}

impl<'a> Gram<'a> {
    fn new(examples: &'a [&'a SparseVec], kernel: Kernel) -> Self {
        let n = examples.len();
        let norms = examples.iter().map(|x| x.norm_sq()).collect();
        let mut gram = Gram {
            examples,
            kernel,
            norms,
            full: None,
        };
        if n <= FULL_GRAM_LIMIT {
            let mut m = vec![0.0; n * n];
            for i in 0..n {
                for j in i..n {
                    let k = gram.compute(i, j);
                    m[i * n + j] = k;
                    m[j * n + i] = k;
                }
            }
            gram.full = Some(m);
        }
        gram
    }

    fn compute(&self, i: usize, j: usize) -> f64 {
        let dot = self.examples[i].dot(self.examples[j]);
        match self.kernel {
            Kernel::Linear => dot,
            Kernel::Rbf { sigma } => {
                let dist = (self.norms[i] + self.norms[j] - 2.0 * dot).max(0.0);
                libm::exp(-dist / (2.0 * sigma * sigma))
            }
        }
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        match &self.full {
            Some(m) => m[i * self.examples.len() + j],
            None => self.compute(i, j),
        }
    }

    fn row(&self, i: usize, out: &mut [f64]) {
        let n = self.examples.len();
        match &self.full {
            Some(m) => out.copy_from_slice(&m[i * n..(i + 1) * n]),
            None => {
                for (j, o) in out.iter_mut().enumerate() {
                    *o = self.compute(i, j);
                }
            }
        }
    }
}
