use std::io::Write;

use serde::Serialize;
use serde_json::Value;

use crate::args::Format;
use crate::CliError;

pub struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str], rows: Vec<Vec<String>>) -> Self {
        Table {
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows,
        }
    }

    /// `field,value` rows for every scalar leaf of `value`, with dotted paths.
    fn flatten(value: &Value) -> Self {
        fn walk(prefix: &str, v: &Value, rows: &mut Vec<Vec<String>>) {
            let join = |k: &str| {
                if prefix.is_empty() {
                    k.to_string()
                } else {
                    format!("{prefix}.{k}")
                }
            };
            match v {
                Value::Object(map) => map.iter().for_each(|(k, v)| walk(&join(k), v, rows)),
                Value::Array(items) => items
                    .iter()
                    .enumerate()
                    .for_each(|(i, v)| walk(&join(&i.to_string()), v, rows)),
                Value::Null => rows.push(vec![prefix.to_string(), String::new()]),
                Value::String(s) => rows.push(vec![prefix.to_string(), s.clone()]),
                other => rows.push(vec![prefix.to_string(), other.to_string()]),
            }
        }
        let mut rows = Vec::new();
        walk("", value, &mut rows);
        Table::new(&["field", "value"], rows)
    }
}

#[derive(Serialize)]
pub struct Report {
    pub command: String,
    pub params: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measure: Option<Value>,
    pub result: Value,
    #[serde(skip)]
    pub table: Option<Table>,
}

impl Report {
    pub fn write(&self, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
        let io = |e: std::io::Error| CliError::Io(e.to_string());
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, self).map_err(|e| CliError::Io(e.to_string()))?;
                writeln!(out).map_err(io)?;
            }
            Format::Csv => {
                let flat;
                let table = match &self.table {
                    Some(t) => t,
                    None => {
                        flat = Table::flatten(&self.result);
                        &flat
                    }
                };
                let mut w = csv::Writer::from_writer(&mut *out);
                let csv_err = |e: csv::Error| CliError::Io(e.to_string());
                w.write_record(&table.headers).map_err(csv_err)?;
                for row in &table.rows {
                    w.write_record(row).map_err(csv_err)?;
                }
                w.flush().map_err(io)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn flatten_paths() {
        let t = Table::flatten(&json!({"a": 1, "b": {"c": [true, null]}, "d": "x"}));
        let rows: Vec<String> = t.rows.iter().map(|r| r.join("=")).collect();
        assert_eq!(rows, vec!["a=1", "b.c.0=true", "b.c.1=", "d=x"]);
    }
}
