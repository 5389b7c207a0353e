//! svmlight-style sparse text files.
//!
//! One item per line: `<label> <index>:<value> ...` with 1-based, strictly
//! increasing feature indices. Labels are `+1`, `-1` or `0` (unlabeled).
//! Blank lines and anything after `#` are ignored. A sidecar group file holds
//! one group token per line, in row order.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use pubag_core::data::{Dataset, Label, SparseVec};

use crate::error::{Error, Result};

fn format_error(line: usize, message: impl Into<String>) -> Error {
    Error::Format {
        line,
        message: message.into(),
    }
}

fn parse_label(token: &str, line: usize) -> Result<Option<Label>> {
    let value: f64 = token
        .parse()
        .map_err(|_| format_error(line, format!("invalid label {token:?}")))?;
    match value {
        v if v == 1.0 => Ok(Some(Label::Positive)),
        v if v == -1.0 => Ok(Some(Label::Negative)),
        v if v == 0.0 => Ok(None),
        _ => Err(format_error(line, format!("label must be +1, -1 or 0, got {token}"))),
    }
}

fn parse_line(text: &str, line: usize) -> Result<Option<(Option<Label>, SparseVec)>> {
    let body = text.split('#').next().unwrap_or("").trim();
    if body.is_empty() {
        return Ok(None);
    }
    let mut tokens = body.split_whitespace();
    let label = parse_label(tokens.next().unwrap_or_default(), line)?;
    let mut entries = Vec::new();
    let mut last = 0u64;
    for token in tokens {
        let (index, value) = token
            .split_once(':')
            .ok_or_else(|| format_error(line, format!("expected index:value, got {token:?}")))?;
        let index: u64 = index
            .parse()
            .map_err(|_| format_error(line, format!("invalid feature index {index:?}")))?;
        if index == 0 {
            return Err(format_error(line, "feature indices are 1-based"));
        }
        if index <= last {
            return Err(format_error(line, "indices not increasing"));
        }
        if index > u64::from(u32::MAX) {
            return Err(format_error(line, "feature index too large"));
        }
        last = index;
        let value: f64 = value
            .parse()
            .map_err(|_| format_error(line, format!("invalid value {value:?}")))?;
        if !value.is_finite() {
            return Err(format_error(line, "non-finite feature value"));
        }
        if value != 0.0 {
            entries.push(((index - 1) as u32, value));
        }
    }
    Ok(Some((label, SparseVec::new(entries)?)))
}

/// Parses svmlight text. Items labeled `0` get no label; if every item is
/// unlabeled the dataset carries no labels at all.
pub fn parse<R: BufRead>(reader: R) -> Result<Dataset> {
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        if let Some((label, row)) = parse_line(&line?, i + 1)? {
            labels.push(label);
            rows.push(row);
        }
    }
    if rows.is_empty() {
        return Err(Error::NoRows);
    }
    let n_features = rows.iter().map(SparseVec::dim).max().unwrap_or(0);
    let ds = Dataset::new(n_features, rows);
    if labels.iter().all(Option::is_none) {
        Ok(ds)
    } else {
        Ok(ds.with_labels(labels)?)
    }
}

pub fn load(path: &Path) -> Result<Dataset> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse(BufReader::new(file)).map_err(|e| e.in_file(path))
}

/// Loads a dataset and, when given, its group sidecar.
pub fn load_with_groups(path: &Path, groups: Option<&Path>) -> Result<Dataset> {
    let ds = load(path)?;
    match groups {
        Some(g) => {
            let tokens = read_groups(g)?;
            Ok(ds.with_groups(tokens).map_err(|e| Error::from(e).in_file(g))?)
        }
        None => Ok(ds),
    }
}

pub fn read_groups(path: &Path) -> Result<Vec<String>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut groups = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let token = line.trim();
        if token.is_empty() {
            return Err(format_error(i + 1, "empty group token").in_file(path));
        }
        groups.push(token.to_string());
    }
    Ok(groups)
}

/// Writes `ds` in svmlight form; items without a label are written as `0`.
pub fn write<W: Write>(ds: &Dataset, mut out: W) -> std::io::Result<()> {
    for i in 0..ds.n_items() {
        let label = match ds.label(i) {
            Some(Label::Positive) => "+1",
            Some(Label::Negative) => "-1",
            None => "0",
        };
        write!(out, "{label}")?;
        for &(j, v) in ds.row(i).entries() {
            write!(out, " {}:{v}", j + 1)?;
        }
        writeln!(out)?;
    }
    out.flush()
}

pub fn save(ds: &Dataset, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write(ds, BufWriter::new(file)).map_err(|e| Error::io(path, e))
}
