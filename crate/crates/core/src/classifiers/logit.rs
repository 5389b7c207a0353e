//! Class-weighted L2-regularized logistic regression, solved by Newton-CG with
//! a backtracking line search.
//!
//! The objective over the augmented weights `w~ = (w, b)` is
//!
//! ```text
//! F(w~) = |w~|^2 / (2C) + C+ sum_pos log(1 + e^{-f(x)}) + C- sum_neg log(1 + e^{f(x)})
//! ```

use alloc::vec;
use alloc::vec::Vec;

use super::{
    check_classes, DecisionModel, Kernel, Learner, TrainConfig, TrainDiagnostics,
    WeightedClassifier,
};
use crate::data::SparseVec;
use crate::error::{Error, Result};

const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1e-12;

/// `log(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + libm::log1p(libm::exp(-z))
    } else {
        libm::log1p(libm::exp(z))
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + libm::exp(-z))
    } else {
        let e = libm::exp(z);
        e / (1.0 + e)
    }
}

/// The weighted logistic objective. Parameter vectors have length `dim() + 1`;
/// the last entry is the bias.
pub struct LogisticObjective<'a> {
    examples: Vec<&'a SparseVec>,
    y: Vec<f64>,
    cost: Vec<f64>,
    c: f64,
    dim: usize,
}

impl<'a> LogisticObjective<'a> {
    pub fn new(pos: &[&'a SparseVec], neg: &[&'a SparseVec], cfg: &TrainConfig) -> Self {
        let (c_pos, c_neg) = cfg.costs.resolve(cfg.c, pos.len(), neg.len());
        let examples: Vec<&SparseVec> = pos.iter().chain(neg).copied().collect();
        let dim = examples.iter().map(|x| x.dim()).max().unwrap_or(0);
        let y = (0..examples.len())
            .map(|i| if i < pos.len() { 1.0 } else { -1.0 })
            .collect();
        let cost = (0..examples.len())
            .map(|i| if i < pos.len() { c_pos } else { c_neg })
            .collect();
        LogisticObjective {
            examples,
            y,
            cost,
            c: cfg.c,
            dim,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn margin(&self, i: usize, params: &[f64]) -> f64 {
        self.y[i] * (self.examples[i].dot_dense(&params[..self.dim]) + params[self.dim])
    }

    pub fn value(&self, params: &[f64]) -> f64 {
        let reg = params.iter().map(|v| v * v).sum::<f64>() / (2.0 * self.c);
        let loss: f64 = (0..self.examples.len())
            .map(|i| self.cost[i] * softplus(-self.margin(i, params)))
            .sum();
        reg + loss
    }

    pub fn gradient(&self, params: &[f64]) -> Vec<f64> {
        let mut g: Vec<f64> = params.iter().map(|v| v / self.c).collect();
        for i in 0..self.examples.len() {
            let coef = -self.cost[i] * sigmoid(-self.margin(i, params)) * self.y[i];
            self.examples[i].axpy_into(coef, &mut g[..self.dim]);
            g[self.dim] += coef;
        }
        g
    }

    /// Per-example Hessian weights `C_i s(z_i) s(-z_i)`.
    fn curvature(&self, params: &[f64]) -> Vec<f64> {
        (0..self.examples.len())
            .map(|i| {
                let s = sigmoid(self.margin(i, params));
                self.cost[i] * s * (1.0 - s)
            })
            .collect()
    }

    fn hessian_vec(&self, curvature: &[f64], v: &[f64], out: &mut [f64]) {
        for (o, vi) in out.iter_mut().zip(v) {
            *o = vi / self.c;
        }
        for (i, x) in self.examples.iter().enumerate() {
            let coef = curvature[i] * (x.dot_dense(&v[..self.dim]) + v[self.dim]);
            if coef != 0.0 {
                x.axpy_into(coef, &mut out[..self.dim]);
                out[self.dim] += coef;
            }
        }
    }

    /// Approximately solves `H d = -g` by conjugate gradients.
    fn newton_direction(&self, curvature: &[f64], g: &[f64], rel_tol: f64) -> Vec<f64> {
        let m = g.len();
        let mut d = vec![0.0; m];
        let mut r: Vec<f64> = g.iter().map(|v| -v).collect();
        let mut p = r.clone();
        let mut hp = vec![0.0; m];
        let mut rr = dot(&r, &r);
        let stop = rel_tol * rel_tol * rr;
        for _ in 0..m.max(1) * 2 {
            if rr <= stop {
                break;
            }
            self.hessian_vec(curvature, &p, &mut hp);
            let step = rr / dot(&p, &hp);
            for k in 0..m {
                d[k] += step * p[k];
                r[k] -= step * hp[k];
            }
            let rr_next = dot(&r, &r);
            let beta = rr_next / rr;
            rr = rr_next;
            for k in 0..m {
                p[k] = r[k] + beta * p[k];
            }
        }
        d
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn train_logit(
    pos: &[&SparseVec],
    neg: &[&SparseVec],
    cfg: &TrainConfig,
) -> Result<WeightedClassifier> {
    cfg.validate()?;
    if cfg.kernel != Kernel::Linear {
        return Err(Error::Unsupported(
            "logistic regression supports the linear kernel only",
        ));
    }
    check_classes(pos, neg)?;
    let objective = LogisticObjective::new(pos, neg, cfg);
    let mut params = vec![0.0; objective.dim() + 1];
    let mut value = objective.value(&params);
    let mut history = vec![value];
    let mut grad = objective.gradient(&params);
    let mut iterations = 0;
    let mut converged = max_norm(&grad) <= cfg.tolerance;

    while !converged && iterations < cfg.max_iterations {
        iterations += 1;
        let curvature = objective.curvature(&params);
        let gnorm = libm::sqrt(dot(&grad, &grad));
        let direction = objective.newton_direction(&curvature, &grad, gnorm.min(0.1));
        let slope = dot(&grad, &direction);
        if !(slope < 0.0) {
            break;
        }
        let mut step = 1.0;
        let mut trial = params.clone();
        let accepted = loop {
            for k in 0..params.len() {
                trial[k] = params[k] + step * direction[k];
            }
            let trial_value = objective.value(&trial);
            if trial_value <= value + ARMIJO * step * slope {
                break Some(trial_value);
            }
            step *= 0.5;
            if step < MIN_STEP {
                break None;
            }
        };
        let Some(next) = accepted else { break };
        if next >= value {
            // numerically flat: no further progress possible
            break;
        }
        core::mem::swap(&mut params, &mut trial);
        value = next;
        history.push(value);
        grad = objective.gradient(&params);
        converged = max_norm(&grad) <= cfg.tolerance;
    }

    let bias = params.pop().unwrap_or(0.0);
    Ok(WeightedClassifier {
        kind: Learner::Logit,
        model: DecisionModel::Linear {
            weights: params,
            bias,
        },
        config: *cfg,
        diagnostics: TrainDiagnostics {
            iterations,
            violation: max_norm(&grad),
            converged,
            objective: value,
            objective_history: history,
        },
    })
}
