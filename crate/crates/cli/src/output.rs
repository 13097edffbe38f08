// SPDX-License-Identifier: Apache-2.0

use std::io::Write;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::CliError;

/// JSON-lines records plus human-readable tables, written at the end.
#[derive(Debug, Default)]
pub struct Report {
    records: Vec<Value>,
    tables: Vec<Table>,
}

impl Report {
    /// Adds `{"record": kind, ...fields of body}`.
    pub fn record<T: Serialize>(&mut self, kind: &str, body: &T) -> Result<(), CliError> {
        let mut obj = Map::new();
        obj.insert("record".into(), Value::String(kind.into()));
        match serde_json::to_value(body).map_err(|e| CliError::Output(e.to_string()))? {
            Value::Object(fields) => obj.extend(fields),
            other => {
                obj.insert("value".into(), other);
            }
        }
        self.records.push(Value::Object(obj));
        Ok(())
    }

    /// Like [`Report::record`] with extra fields.
    pub fn record_with<T: Serialize>(
        &mut self,
        kind: &str,
        extra: &[(&str, Value)],
        body: &T,
    ) -> Result<(), CliError> {
        self.record(kind, body)?;
        if let Some(Value::Object(obj)) = self.records.last_mut() {
            for (k, v) in extra {
                obj.insert((*k).to_string(), v.clone());
            }
        }
        Ok(())
    }

    pub fn table(&mut self, table: Table) {
        self.tables.push(table);
    }

    pub fn write_records<W: Write>(&self, mut out: W) -> Result<(), CliError> {
        for r in &self.records {
            serde_json::to_writer(&mut out, r).map_err(|e| CliError::Output(e.to_string()))?;
            out.write_all(b"\n")?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_tables<W: Write>(&self, mut out: W) -> Result<(), CliError> {
        for (i, t) in self.tables.iter().enumerate() {
            if i > 0 {
                writeln!(out)?;
            }
            t.render(&mut out)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Left-aligned text table.
#[derive(Debug, Clone)]
pub struct Table {
    title: String,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(title: &str, header: &[&str]) -> Self {
        Self {
            title: title.to_string(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    fn render<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.len()).collect();
        for row in &self.rows {
            for (i, c) in row.iter().enumerate() {
                if i < widths.len() {
                    widths[i] = widths[i].max(c.len());
                }
            }
        }
        let line = |cells: &[String]| -> String {
            cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        };
        writeln!(out, "{}", self.title)?;
        writeln!(out, "{}", line(&self.header))?;
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        writeln!(out, "{}", line(&rule))?;
        for row in &self.rows {
            writeln!(out, "{}", line(row))?;
        }
        Ok(())
    }
}

pub fn fmt_f(x: f64) -> String {
    if x == 0.0 || (1e-3..1e6).contains(&x.abs()) {
        format!("{x:.6}")
    } else {
        format!("{x:.4e}")
    }
}
