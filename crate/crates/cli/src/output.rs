//! Report emission. JSON reports are pretty-printed with sorted keys; CSV
//! reports flatten the `rows` table of the result, or the scalar fields of
//! the result when it has no table.

use std::fs;
use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn to_csv(report: &Value) -> Result<String, String> {
    let result = &report["result"];
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| e.to_string();
    match result.get("rows").and_then(Value::as_array) {
        Some(rows) if !rows.is_empty() => {
            let header: Vec<&String> = match &rows[0] {
                Value::Object(m) => m.keys().collect(),
                _ => return Err("table rows must be objects".into()),
            };
            w.write_record(header.iter().map(|s| s.as_str())).map_err(err)?;
            for row in rows {
                w.write_record(header.iter().map(|k| cell(&row[k.as_str()])))
                    .map_err(err)?;
            }
        }
        _ => {
            w.write_record(["field", "value"]).map_err(err)?;
            if let Value::Object(m) = result {
                for (k, v) in m {
                    if !v.is_object() && !v.is_array() {
                        w.write_record([k.as_str(), &cell(v)]).map_err(err)?;
                    }
                }
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| e.to_string())?;
    String::from_utf8(bytes).map_err(|e| e.to_string())
}

pub fn render(report: &Value, format: Format) -> Result<String, String> {
    match format {
        Format::Json => serde_json::to_string_pretty(report)
            .map(|s| s + "\n")
            .map_err(|e| e.to_string()),
        Format::Csv => to_csv(report),
    }
}

pub fn emit(report: &Value, format: Format, out: Option<&Path>) -> Result<(), String> {
    let text = render(report, format)?;
    match out {
        Some(path) => fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    }
}
