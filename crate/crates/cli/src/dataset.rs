//! Input file ingestion and validation.
//!
//! Table CSV: UTF-8, comma separator, `.` decimal point; first row holds the
//! column labels (first cell is a corner label and is ignored), first column
//! holds the row labels. Group file: two columns `row_label,group_label`,
//! one line per table row. Block file: lines `block_label,row_count` in
//! stacked order.

use std::path::Path;

use diadem::tabular::{BlockDescriptor, DataTable, GroupAssignment};
use ndarray::Array2;

use crate::error::CliError;

fn read_to_string(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn file_name(path: &Path) -> String {
    path.display().to_string()
}

/// Read a labeled numeric table.
pub fn load_table(path: &Path) -> Result<DataTable, CliError> {
    let raw = read_to_string(path)?;
    let file = file_name(path);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(raw.as_bytes());

    let mut records = reader.records();
    let header = match records.next() {
        Some(Ok(r)) => r,
        Some(Err(e)) => {
            return Err(CliError::Parse {
                file,
                line: 1,
                reason: e.to_string(),
            })
        }
        None => {
            return Err(CliError::Parse {
                file,
                line: 1,
                reason: "empty file".into(),
            })
        }
    };
    if header.len() < 2 {
        return Err(CliError::Parse {
            file,
            line: 1,
            reason: "expected a row-label column followed by data columns".into(),
        });
    }
    let col_labels: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let p = col_labels.len();

    let mut row_labels = Vec::new();
    let mut values = Vec::new();
    for (i, record) in records.enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| CliError::Parse {
            file: file.clone(),
            line,
            reason: e.to_string(),
        })?;
        if record.len() != p + 1 {
            return Err(CliError::Parse {
                file,
                line,
                reason: format!("expected {} fields, found {}", p + 1, record.len()),
            });
        }
        row_labels.push(record[0].to_string());
        for (j, cell) in record.iter().skip(1).enumerate() {
            let v: f64 = cell.parse().map_err(|_| CliError::NonNumericCell {
                file: file.clone(),
                line,
                column: col_labels[j].clone(),
            })?;
            values.push(v);
        }
    }
    if row_labels.is_empty() {
        return Err(CliError::Parse {
            file,
            line: 2,
            reason: "table has no data rows".into(),
        });
    }
    let n = row_labels.len();
    let values = Array2::from_shape_vec((n, p), values).expect("shape checked");
    DataTable::new(values, row_labels, col_labels).map_err(CliError::InvalidInput)
}

/// Read the `row_label,group_label` file and align it with the table rows.
pub fn load_groups(path: &Path, row_labels: &[String]) -> Result<GroupAssignment, CliError> {
    let raw = read_to_string(path)?;
    let file = file_name(path);
    let mut by_row = std::collections::HashMap::new();
    for (i, line) in raw.lines().enumerate() {
        let line_no = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (row, group) = line.split_once(',').ok_or_else(|| CliError::Parse {
            file: file.clone(),
            line: line_no,
            reason: "expected `row_label,group_label`".into(),
        })?;
        if by_row.insert(row.trim().to_string(), group.trim().to_string()).is_some() {
            return Err(CliError::Parse {
                file,
                line: line_no,
                reason: format!("row `{}` listed twice", row.trim()),
            });
        }
    }
    let mut group_labels: Vec<String> = Vec::new();
    let mut group_of = Vec::with_capacity(row_labels.len());
    for row in row_labels {
        let group = by_row.get(row).ok_or_else(|| CliError::Parse {
            file: file.clone(),
            line: 0,
            reason: format!("table row `{row}` missing from group file"),
        })?;
        let idx = match group_labels.iter().position(|g| g == group) {
            Some(i) => i,
            None => {
                group_labels.push(group.clone());
                group_labels.len() - 1
            }
        };
        group_of.push(idx);
    }
    GroupAssignment::new(group_of, group_labels).map_err(CliError::InvalidInput)
}

/// Read the `block_label,row_count` file.
pub fn load_blocks(path: &Path) -> Result<BlockDescriptor, CliError> {
    let raw = read_to_string(path)?;
    let file = file_name(path);
    let mut blocks = Vec::new();
    for (i, line) in raw.lines().enumerate() {
        let line_no = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (label, count) = line.split_once(',').ok_or_else(|| CliError::Parse {
            file: file.clone(),
            line: line_no,
            reason: "expected `block_label,row_count`".into(),
        })?;
        let count: usize = count.trim().parse().map_err(|_| CliError::Parse {
            file: file.clone(),
            line: line_no,
            reason: format!("`{}` is not a row count", count.trim()),
        })?;
        blocks.push((label.trim().to_string(), count));
    }
    if blocks.is_empty() {
        return Err(CliError::Parse {
            file,
            line: 1,
            reason: "block file is empty".into(),
        });
    }
    BlockDescriptor::new(blocks).map_err(CliError::InvalidInput)
}
