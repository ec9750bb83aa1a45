//! Sweep-table serialization: RFC-4180 CSV and JSON row arrays. Numbers are
//! written in scientific notation with 17 significant digits, which
//! round-trips every f64 exactly and makes golden files meaningful.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::spectral::SpectrumStatus;
use crate::sweep::SweepTable;

/// 17 significant digits, scientific notation.
pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

fn status_str(s: SpectrumStatus) -> &'static str {
    match s {
        SpectrumStatus::Ok => "ok",
        SpectrumStatus::NearDegenerate => "degenerate",
    }
}

fn csv_quote(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Render the table as CSV: one header row, one record per flux point,
/// CRLF-free line endings.
pub fn to_csv(table: &SweepTable) -> Result<String> {
    if table.is_empty() {
        return Err(Error::EmptyTable);
    }
    let mut out = String::new();
    out.push_str(&table.column_names().join(","));
    out.push('\n');
    for row in &table.rows {
        let mut fields: Vec<String> =
            table.numeric_row(row).iter().map(|&v| format_number(v)).collect();
        fields.push(csv_quote(status_str(row.status)));
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    Ok(out)
}

/// Render the table as a JSON array of row objects, keys in column order.
pub fn to_json(table: &SweepTable) -> Result<String> {
    if table.is_empty() {
        return Err(Error::EmptyTable);
    }
    let names = table.column_names();
    let mut out = String::from("[\n");
    for (k, row) in table.rows.iter().enumerate() {
        let values = table.numeric_row(row);
        out.push_str("  {");
        for (name, v) in names.iter().zip(values.iter()) {
            let _ = write!(out, "\"{name}\": {}, ", format_number(*v));
        }
        let _ = write!(out, "\"status\": \"{}\"}}", status_str(row.status));
        out.push_str(if k + 1 < table.rows.len() { ",\n" } else { "\n" });
    }
    out.push_str("]\n");
    Ok(out)
}

/// Parsed-back numeric content of an emitted table: column names (status
/// excluded) and one numeric vector per row.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub status: Vec<String>,
}

fn split_csv_record(line: &str) -> Vec<String> {
    // Fields are numbers or bare words; quoting only appears around
    // embedded commas/quotes, which the emitter never produces today.
    let mut fields = Vec::new();
    let mut cur = String::new();
    let mut in_quotes = false;
    let mut chars = line.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '"' if in_quotes && chars.peek() == Some(&'"') => {
                cur.push('"');
                chars.next();
            }
            '"' => in_quotes = !in_quotes,
            ',' if !in_quotes => fields.push(std::mem::take(&mut cur)),
            c => cur.push(c),
        }
    }
    fields.push(cur);
    fields
}

pub fn parse_csv(text: &str) -> Result<ParsedTable> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::TableParse("missing header".into()))?;
    let names = split_csv_record(header);
    if names.last().map(String::as_str) != Some("status") {
        return Err(Error::TableParse("last column must be `status`".into()));
    }
    let ncols = names.len();
    let mut rows = Vec::new();
    let mut status = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields = split_csv_record(line);
        if fields.len() != ncols {
            return Err(Error::TableParse(format!(
                "record {} has {} fields, expected {ncols}",
                lineno + 2,
                fields.len()
            )));
        }
        let mut nums = Vec::with_capacity(ncols - 1);
        for (name, field) in names.iter().zip(&fields).take(ncols - 1) {
            let v: f64 = field.parse().map_err(|_| {
                Error::TableParse(format!("column {name}: bad number `{field}`"))
            })?;
            nums.push(v);
        }
        rows.push(nums);
        status.push(fields[ncols - 1].clone());
    }
    Ok(ParsedTable { columns: names[..ncols - 1].to_vec(), rows, status })
}

pub fn parse_json(text: &str) -> Result<ParsedTable> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::TableParse(e.to_string()))?;
    let arr = value.as_array().ok_or_else(|| Error::TableParse("expected an array".into()))?;
    let mut columns: Vec<String> = Vec::new();
    let mut rows = Vec::new();
    let mut status = Vec::new();
    for (k, item) in arr.iter().enumerate() {
        let obj = item
            .as_object()
            .ok_or_else(|| Error::TableParse(format!("row {k}: expected an object")))?;
        if columns.is_empty() {
            columns = obj.keys().filter(|k| k.as_str() != "status").cloned().collect();
        }
        let mut nums = Vec::with_capacity(columns.len());
        for name in &columns {
            let v = obj
                .get(name)
                .and_then(|v| v.as_f64())
                .ok_or_else(|| Error::TableParse(format!("row {k}: missing number {name}")))?;
            nums.push(v);
        }
        rows.push(nums);
        status.push(
            obj.get("status").and_then(|v| v.as_str()).unwrap_or("ok").to_string(),
        );
    }
    Ok(ParsedTable { columns, rows, status })
}
