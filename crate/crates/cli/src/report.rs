//! Deterministic serialization of command reports.

use std::str::FromStr;

use serde_json::Value;
use thiserror::Error;
use vessel_core::io::canonical_json;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("unsupported report format {0:?} (expected json or csv)")]
    UnsupportedFormat(String),
    #[error("csv writer: {0}")]
    Csv(#[from] csv::Error),
}

impl FromStr for Format {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(ReportError::UnsupportedFormat(s.to_string())),
        }
    }
}

/// JSON: canonical single line. CSV: a table report `{"columns": [...], "rows": [[...], ...]}`
/// is written as is; any other report is flattened into a single row.
pub fn emit(v: &Value, format: Format) -> Result<String, ReportError> {
    match format {
        Format::Json => Ok(canonical_json(v) + "\n"),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            match (v.get("columns").and_then(Value::as_array), v.get("rows").and_then(Value::as_array)) {
                (Some(cols), Some(rows)) => {
                    w.write_record(cols.iter().map(cell))?;
                    for row in rows {
                        let cells: Vec<String> = row.as_array().map(|r| r.iter().map(cell).collect()).unwrap_or_default();
                        w.write_record(&cells)?;
                    }
                }
                _ => {
                    let flat = flatten(v);
                    w.write_record(flat.iter().map(|(k, _)| k))?;
                    w.write_record(flat.iter().map(|(_, x)| x))?;
                }
            }
            let bytes = w.into_inner().map_err(|e| ReportError::Csv(e.into_error().into()))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => canonical_json(other),
    }
}

/// Leaf values keyed by their dotted path, object keys sorted.
pub fn flatten(v: &Value) -> Vec<(String, String)> {
    let mut out = Vec::new();
    walk(v, String::new(), &mut out);
    out
}

fn walk(v: &Value, path: String, out: &mut Vec<(String, String)>) {
    let join = |k: &str| if path.is_empty() { k.to_string() } else { format!("{path}.{k}") };
    match v {
        Value::Object(o) => {
            let mut keys: Vec<&String> = o.keys().collect();
            keys.sort();
            for k in keys {
                walk(&o[k], join(k), out);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                walk(x, join(&i.to_string()), out);
            }
        }
        leaf => out.push((path, cell(leaf))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn empty_record_is_canonical() {
        assert_eq!(emit(&json!({}), Format::Json).unwrap(), "{}\n");
    }

    #[test]
    fn sweep_to_csv() {
        let v = json!({"columns": ["t", "y"], "rows": [[0.0, 1], [0.5, 2], [1.0, 3]]});
        let text = emit(&v, Format::Csv).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "t,y");
        assert_eq!(lines[2], "5.0000000000000000e-1,2");
    }

    #[test]
    fn unknown_format() {
        assert!(matches!("xml".parse::<Format>(), Err(ReportError::UnsupportedFormat(_))));
    }
}
