//! Relabeled-tuple serialization: JSON lines and CSV.
//!
//! Both formats carry the same six fields per tuple. Readers validate each
//! record — parseability, finite values, nonnegative `gamma_tilde`, and the
//! `done` implies `gamma_tilde == 0` invariant — and report failures with
//! the offending line number.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::relabel::RelabeledTuple;

fn validate_tuple(t: &RelabeledTuple, path: &Path, line_no: usize) -> Result<()> {
    if !t.r_tilde.is_finite() {
        return Err(Error::format(path, line_no, "r_tilde is not finite"));
    }
    if !t.gamma_tilde.is_finite() || t.gamma_tilde < 0.0 {
        return Err(Error::format(
            path,
            line_no,
            format!("gamma_tilde must be finite and nonnegative: got {}", t.gamma_tilde),
        ));
    }
    if t.done && t.gamma_tilde != 0.0 {
        return Err(Error::format(
            path,
            line_no,
            format!("done tuple must have gamma_tilde == 0: got {}", t.gamma_tilde),
        ));
    }
    Ok(())
}

/// Write tuples as JSON lines.
pub fn write_tuples_jsonl(path: &Path, tuples: &[RelabeledTuple]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for t in tuples {
        let json = serde_json::to_string(t)
            .map_err(|e| Error::invalid(format!("failed to serialize tuple: {e}")))?;
        writeln!(w, "{json}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Read tuples from a JSON-lines file.
pub fn read_tuples_jsonl(path: &Path) -> Result<Vec<RelabeledTuple>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let text = line.map_err(|e| Error::io(path, e))?;
        if text.trim().is_empty() {
            continue;
        }
        let tuple: RelabeledTuple = serde_json::from_str(&text)
            .map_err(|e| Error::format(path, line_no, format!("malformed JSON: {e}")))?;
        validate_tuple(&tuple, path, line_no)?;
        out.push(tuple);
    }
    Ok(out)
}

/// Write tuples as CSV with a header row.
pub fn write_tuples_csv(path: &Path, tuples: &[RelabeledTuple]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    for t in tuples {
        w.serialize(t)
            .map_err(|e| Error::invalid(format!("failed to write CSV record: {e}")))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Read tuples from a CSV file written by [`write_tuples_csv`].
pub fn read_tuples_csv(path: &Path) -> Result<Vec<RelabeledTuple>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(BufReader::new(file));
    let mut out = Vec::new();
    for (idx, record) in reader.deserialize::<RelabeledTuple>().enumerate() {
        // Line 1 is the header, so record i sits on line i + 2.
        let line_no = idx + 2;
        let tuple =
            record.map_err(|e| Error::format(path, line_no, format!("malformed CSV: {e}")))?;
        validate_tuple(&tuple, path, line_no)?;
        out.push(tuple);
    }
    Ok(out)
}
