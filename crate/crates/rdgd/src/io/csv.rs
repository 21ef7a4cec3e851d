//! CSV emission with a fixed column order and 17-significant-digit floats,
//! so identical runs produce identical bytes and parse back exactly.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::experiment::{AggregateRow, RunResult};
use crate::losses::Dataset;
use crate::numerics::matrix::Matrix;

pub const TRIALS_HEADER: &str = "trial,t,gap,c_t,budget_spent,accuracy,bound";
pub const AGGREGATE_HEADER: &str = "t,gap_mean,gap_std,accuracy_mean,accuracy_std,bound";

/// 17 significant digits in scientific notation: round-trips any finite f64
/// bit-exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    let mut f = std::fs::File::create(path)
        .map_err(|e| Error::io(format!("creating {}", path.display()), e))?;
    f.write_all(contents.as_bytes())
        .map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

pub fn trials_csv(result: &RunResult) -> String {
    let mut s = String::from(TRIALS_HEADER);
    s.push('\n');
    for (trial, traces) in result.trials.iter().enumerate() {
        for row in traces {
            s.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                trial,
                row.t,
                fmt_opt(row.gap),
                fmt_f64(row.c_t),
                fmt_f64(row.budget_spent),
                fmt_opt(row.accuracy),
                fmt_opt(row.bound),
            ));
        }
    }
    s
}

pub fn aggregate_csv(result: &RunResult) -> String {
    let mut s = String::from(AGGREGATE_HEADER);
    s.push('\n');
    for row in &result.aggregate {
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.t,
            fmt_opt(row.gap_mean),
            fmt_opt(row.gap_std),
            fmt_opt(row.accuracy_mean),
            fmt_opt(row.accuracy_std),
            fmt_opt(row.bound),
        ));
    }
    s
}

pub fn emit_trials_csv(result: &RunResult, path: &Path) -> Result<()> {
    write_file(path, &trials_csv(result))
}

pub fn emit_aggregate_csv(result: &RunResult, path: &Path) -> Result<()> {
    write_file(path, &aggregate_csv(result))
}

fn parse_field(field: &str, line: usize) -> Result<Option<f64>> {
    if field.is_empty() {
        return Ok(None);
    }
    field
        .parse::<f64>()
        .map(Some)
        .map_err(|_| Error::ConfigGeneral(format!("bad float `{field}` on csv line {line}")))
}

/// Parse an aggregate CSV back into rows (exact inverse of
/// `aggregate_csv` for finite values).
pub fn parse_aggregate_csv(text: &str) -> Result<Vec<AggregateRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == AGGREGATE_HEADER => {}
        other => {
            return Err(Error::ConfigGeneral(format!(
                "unexpected aggregate header {other:?}"
            )))
        }
    }
    let mut rows = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(Error::ConfigGeneral(format!(
                "expected 6 fields on csv line {}, got {}",
                idx + 2,
                fields.len()
            )));
        }
        rows.push(AggregateRow {
            t: fields[0]
                .parse()
                .map_err(|_| Error::ConfigGeneral(format!("bad round index `{}`", fields[0])))?,
            gap_mean: parse_field(fields[1], idx + 2)?,
            gap_std: parse_field(fields[2], idx + 2)?,
            accuracy_mean: parse_field(fields[3], idx + 2)?,
            accuracy_std: parse_field(fields[4], idx + 2)?,
            bound: parse_field(fields[5], idx + 2)?,
        });
    }
    Ok(rows)
}

/// Numeric CSV dataset: every column but the last is a feature, the last is
/// the response. No header.
pub fn load_csv_dataset(path: &Path) -> Result<Dataset> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    let mut rows: Vec<f64> = Vec::new();
    let mut responses = Vec::new();
    let mut width = None;
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<f64> = line
            .split(',')
            .map(|f| {
                f.trim().parse::<f64>().map_err(|_| {
                    Error::ConfigGeneral(format!(
                        "{}: bad number `{f}` on line {}",
                        path.display(),
                        idx + 1
                    ))
                })
            })
            .collect::<Result<_>>()?;
        if fields.len() < 2 {
            return Err(Error::ConfigGeneral(format!(
                "{}: line {} needs at least one feature and a response",
                path.display(),
                idx + 1
            )));
        }
        match width {
            None => width = Some(fields.len()),
            Some(w) if w != fields.len() => {
                return Err(Error::ConfigGeneral(format!(
                    "{}: line {} has {} fields, previous lines had {w}",
                    path.display(),
                    idx + 1,
                    fields.len()
                )))
            }
            _ => {}
        }
        rows.extend_from_slice(&fields[..fields.len() - 1]);
        responses.push(*fields.last().expect("len checked"));
    }
    let width = width.ok_or_else(|| Error::ConfigGeneral(format!("{}: empty dataset", path.display())))?;
    let n = responses.len();
    Dataset::new(Matrix::from_vec(n, width - 1, rows)?, responses)
}
