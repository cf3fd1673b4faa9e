//! CSV and JSON rendering of result tables.

use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Echoed under `meta` in JSON output.
    pub meta: Map<String, Value>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut meta = Map::new();
        meta.insert("version".into(), Value::from(env!("CARGO_PKG_VERSION")));
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            meta,
        }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<Value>) {
        self.meta.insert(key.into(), value.into());
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut out = self.header.join(",");
                out.push('\n');
                for row in &self.rows {
                    out.push_str(&row.join(","));
                    out.push('\n');
                }
                out
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let obj: Map<String, Value> = self
                            .header
                            .iter()
                            .zip(row)
                            .map(|(k, v)| (k.clone(), Value::from(v.as_str())))
                            .collect();
                        Value::Object(obj)
                    })
                    .collect();
                let mut top = Map::new();
                top.insert("meta".into(), Value::Object(self.meta.clone()));
                top.insert("rows".into(), Value::Array(rows));
                let mut out = serde_json::to_string_pretty(&Value::Object(top)).expect("json");
                out.push('\n');
                out
            }
        }
    }
}
