//! CSV ingestion: one vector or function per row, comma-separated decimals.
//! Blank lines are skipped, `#` starts a comment line, and a first row that
//! does not parse as numbers is taken as a header.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use crate::error::{CliError, CliResult};

pub fn read_rows(path: &Path) -> CliResult<Vec<Vec<f64>>> {
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| CliError::io(path, e))?;
    parse_rows(&text)
}

pub fn parse_rows(text: &str) -> CliResult<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut first = true;
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let parsed: Result<Vec<f64>, _> = record.iter().map(|f| f.parse::<f64>()).collect();
        match parsed {
            Ok(row) => {
                if let Some(bad) = row.iter().find(|v| !v.is_finite()) {
                    return Err(CliError::Parse {
                        line,
                        message: format!("non-finite value {bad}"),
                    });
                }
                if let Some(prev) = rows.first() {
                    if prev.len() != row.len() {
                        return Err(CliError::Parse {
                            line,
                            message: format!("expected {} columns, found {}", prev.len(), row.len()),
                        });
                    }
                }
                rows.push(row);
            }
            Err(_) if first => {}
            Err(e) => {
                return Err(CliError::Parse {
                    line,
                    message: e.to_string(),
                })
            }
        }
        first = false;
    }
    if rows.is_empty() {
        return Err(CliError::Parse {
            line: 0,
            message: "no data rows".into(),
        });
    }
    Ok(rows)
}

/// Writes rows so that [`parse_rows`] reads back identical values.
pub fn rows_to_csv(rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    for row in rows {
        let fields: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

/// Parses a comma-separated list such as `0.1,0.2,0.5`.
pub fn parse_list<T: std::str::FromStr>(text: &str) -> CliResult<Vec<T>> {
    text.split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|_| CliError::Usage(format!("cannot parse list item {s:?}"))))
        .collect()
}
