//! On-disk layouts for classifiers, transductive scores and metrics.

use std::io::{BufRead, Write};

use pubag_core::classifiers::WeightedClassifier;
use pubag_core::eval::{MetricsReport, PrCurve};
use pubag_core::pu::EnsembleScore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CLASSIFIER_FORMAT: &str = "pubag-classifier";
pub const CLASSIFIER_VERSION: u32 = 1;

/// A trained classifier as stored on disk:
///
/// ```json
/// {"format": "pubag-classifier", "version": 1, "kind": "svm",
///  "model": {"type": "linear", "weights": [..], "bias": 0.1},
///  "config": {..}, "diagnostics": {..}}
/// ```
///
/// Kernel models use `{"type": "expansion", "kernel": {..}, "support": [..],
/// "coefficients": [..], "bias": ..}` where each support vector is a list of
/// `[index, value]` pairs with 0-based indices.
#[derive(Serialize, Deserialize)]
struct ClassifierFile {
    format: String,
    version: u32,
    #[serde(flatten)]
    classifier: WeightedClassifier,
}

pub fn write_classifier<W: Write>(clf: &WeightedClassifier, mut out: W) -> Result<()> {
    let file = ClassifierFile {
        format: CLASSIFIER_FORMAT.into(),
        version: CLASSIFIER_VERSION,
        classifier: clf.clone(),
    };
    serde_json::to_writer_pretty(&mut out, &file)?;
    writeln!(out)?;
    Ok(())
}

pub fn read_classifier(text: &str) -> Result<WeightedClassifier> {
    let file: ClassifierFile = serde_json::from_str(text)?;
    if file.format != CLASSIFIER_FORMAT || file.version != CLASSIFIER_VERSION {
        return Err(Error::Config(format!(
            "unsupported classifier file {} v{}",
            file.format, file.version
        )));
    }
    Ok(file.classifier)
}

/// One line of a transductive score file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreLine {
    /// Index of the item within the scored set.
    pub item: usize,
    pub score: f64,
    /// Number of classifiers that left the item out.
    pub n: usize,
    pub flags: Vec<String>,
}

pub const FALLBACK_FLAG: &str = "fallback";

/// Writes one JSON line per item. `offset` is subtracted from dataset indices
/// so the item field indexes the scored set itself.
pub fn write_scores<W: Write>(score: &EnsembleScore, offset: usize, mut out: W) -> Result<()> {
    for s in &score.items {
        let line = ScoreLine {
            item: s.item - offset,
            score: s.score,
            n: s.count,
            flags: if s.fallback {
                vec![FALLBACK_FLAG.into()]
            } else {
                Vec::new()
            },
        };
        serde_json::to_writer(&mut out, &line)?;
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_scores<R: BufRead>(input: R) -> Result<Vec<ScoreLine>> {
    input
        .lines()
        .filter(|l| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
        .map(|l| Ok(serde_json::from_str(&l?)?))
        .collect()
}

pub fn write_metrics<W: Write>(report: &MetricsReport, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, report)?;
    writeln!(out)?;
    Ok(())
}

pub fn write_roc_csv<W: Write>(points: &[(f64, f64)], mut out: W) -> Result<()> {
    writeln!(out, "fpr,tpr")?;
    for (fpr, tpr) in points {
        writeln!(out, "{fpr},{tpr}")?;
    }
    Ok(())
}

pub fn write_pr_csv<W: Write>(curve: &PrCurve, mut out: W) -> Result<()> {
    writeln!(out, "threshold,recall,precision")?;
    for p in &curve.points {
        writeln!(out, "{},{},{}", p.threshold, p.recall, p.precision)?;
    }
    Ok(())
}
