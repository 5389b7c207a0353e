use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Score-tied blocks in descending score order: `(score, positives, negatives)`.
fn tie_groups(scores: &[f64], labels: &[bool]) -> Result<(Vec<(f64, usize, usize)>, usize, usize)> {
    if scores.len() != labels.len() {
        return Err(Error::LengthMismatch {
            scores: scores.len(),
            labels: labels.len(),
        });
    }
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::SingleClass);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut groups: Vec<(f64, usize, usize)> = Vec::new();
    for i in order {
        let (p, n) = if labels[i] { (1, 0) } else { (0, 1) };
        match groups.last_mut() {
            Some(g) if g.0 == scores[i] => {
                g.1 += p;
                g.2 += n;
            }
            _ => groups.push((scores[i], p, n)),
        }
    }
    Ok((groups, n_pos, n_neg))
}

/// Area under the ROC curve with half credit for ties (the Mann-Whitney statistic).
/// `labels[i]` is `true` for positives.
pub fn auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    let (groups, n_pos, n_neg) = tie_groups(scores, labels)?;
    let mut neg_below = n_neg as f64;
    let mut wins = 0.0;
    for &(_, p, n) in &groups {
        neg_below -= n as f64;
        wins += p as f64 * (neg_below + 0.5 * n as f64);
    }
    Ok(wins / (n_pos as f64 * n_neg as f64))
}

/// ROC points `(fpr, tpr)` from `(0, 0)` to `(1, 1)`, one per distinct threshold.
pub fn roc_curve(scores: &[f64], labels: &[bool]) -> Result<Vec<(f64, f64)>> {
    let (groups, n_pos, n_neg) = tie_groups(scores, labels)?;
    let mut points = Vec::with_capacity(groups.len() + 1);
    points.push((0.0, 0.0));
    let (mut tp, mut fp) = (0usize, 0usize);
    for &(_, p, n) in &groups {
        tp += p;
        fp += n;
        points.push((fp as f64 / n_neg as f64, tp as f64 / n_pos as f64));
    }
    Ok(points)
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PrPoint {
    pub threshold: f64,
    pub recall: f64,
    pub precision: f64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PrCurve {
    pub points: Vec<PrPoint>,
    pub aupr: f64,
}

/// Precision/recall at every distinct threshold (scores `>= threshold` are called
/// positive). The area holds each precision over the recall interval it closes.
pub fn precision_recall(scores: &[f64], labels: &[bool]) -> Result<PrCurve> {
    let (groups, n_pos, _) = tie_groups(scores, labels)?;
    let mut points = Vec::with_capacity(groups.len());
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut aupr = 0.0;
    let mut last_recall = 0.0;
    for &(threshold, p, n) in &groups {
        tp += p;
        fp += n;
        let recall = tp as f64 / n_pos as f64;
        let precision = tp as f64 / (tp + fp) as f64;
        aupr += (recall - last_recall) * precision;
        last_recall = recall;
        points.push(PrPoint {
            threshold,
            recall,
            precision,
        });
    }
    Ok(PrCurve { points, aupr })
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MetricsReport {
    pub roc_points: Vec<(f64, f64)>,
    pub auc: f64,
    pub pr_points: Vec<(f64, f64)>,
    pub aupr: f64,
    pub n_pos: usize,
    pub n_neg: usize,
}

impl MetricsReport {
    pub fn compute(scores: &[f64], labels: &[bool]) -> Result<Self> {
        let pr = precision_recall(scores, labels)?;
        let n_pos = labels.iter().filter(|&&l| l).count();
        Ok(MetricsReport {
            roc_points: roc_curve(scores, labels)?,
            auc: auc(scores, labels)?,
            pr_points: pr.points.iter().map(|p| (p.recall, p.precision)).collect(),
            aupr: pr.aupr,
            n_pos,
            n_neg: labels.len() - n_pos,
        })
    }
}
