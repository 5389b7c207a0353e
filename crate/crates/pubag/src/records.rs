//! JSON-lines result records.

use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::Path;

use pubag_core::classifiers::Learner;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentKind;
use crate::error::{Error, Result};

/// Enough to re-run the record: the config it came from and its seeds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub experiment: ExperimentKind,
    pub config_hash: String,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Failed,
    Skipped,
}

/// One method evaluated on one replicate of one grid cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    #[serde(flatten)]
    pub provenance: Provenance,
    pub cell: usize,
    pub replicate: usize,
    pub replicate_seed: u64,
    pub method: String,
    pub learner: Learner,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub task: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    pub n_positives: usize,
    pub n_unlabeled: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub auc: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aupr: Option<f64>,
    /// Realized contamination of `U`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contamination: Option<f64>,
    /// Items scored by the fallback rule.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flagged: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seconds: Option<f64>,
}

/// Macro-averaged AUC of one method at one `|P|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MacroSummary {
    #[serde(flatten)]
    pub provenance: Provenance,
    pub n_positives: usize,
    pub method: String,
    pub macro_auc: f64,
    pub n_tasks: usize,
}

/// Paired signed-rank test of `method_a` against `method_b` over (task, replicate) pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonSummary {
    #[serde(flatten)]
    pub provenance: Provenance,
    pub n_positives: usize,
    pub method_a: String,
    pub method_b: String,
    pub n_pairs: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_used: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_plus: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Medians over replicates of one timed method.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingSummary {
    #[serde(flatten)]
    pub provenance: Provenance,
    pub method: String,
    pub k: Option<usize>,
    pub t: Option<usize>,
    pub n_positives: usize,
    pub n_unlabeled: usize,
    pub median_seconds: f64,
    pub median_auc: Option<f64>,
    pub replicates: usize,
}

/// Predicted `|U|/|P|` above which bagging beats a single fit, for a cost exponent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRecord {
    #[serde(flatten)]
    pub provenance: Provenance,
    pub method: String,
    pub t: usize,
    pub alpha: f64,
    pub threshold: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub enum Line {
    Result(ResultRecord),
    Summary(MacroSummary),
    Wilcoxon(WilcoxonSummary),
    Timing(TimingSummary),
    Threshold(ThresholdRecord),
}

impl Line {
    pub fn as_result(&self) -> Option<&ResultRecord> {
        match self {
            Line::Result(r) => Some(r),
            _ => None,
        }
    }
}

/// Destination of result lines.
pub trait Sink {
    fn emit(&mut self, line: &Line) -> Result<()>;
}

impl Sink for Vec<Line> {
    fn emit(&mut self, line: &Line) -> Result<()> {
        self.push(line.clone());
        Ok(())
    }
}

/// Appends one JSON object per line and flushes after each, so an interrupted
/// run leaves a readable prefix.
pub struct JsonLines<W: Write> {
    out: W,
}

impl<W: Write> JsonLines<W> {
    pub fn new(out: W) -> Self {
        JsonLines { out }
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

impl JsonLines<BufWriter<File>> {
    pub fn append(path: &Path) -> Result<Self> {
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| Error::io(path, e))?;
        Ok(JsonLines::new(BufWriter::new(file)))
    }
}

impl<W: Write> Sink for JsonLines<W> {
    fn emit(&mut self, line: &Line) -> Result<()> {
        serde_json::to_writer(&mut self.out, line)?;
        self.out.write_all(b"\n")?;
        self.out.flush()?;
        Ok(())
    }
}
