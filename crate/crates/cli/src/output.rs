//! Records and the three output encodings (aligned table, CSV, JSON).

use std::io::{self, Write};

use allocgrid::rational::to_f64;
use allocgrid::Rational;
use serde_json::{json, Map, Value};

/// Version of the JSON envelope; bump on any incompatible field change.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Clone)]
pub enum Field {
    /// Exact value; rendered as `a/b` plus a `<name>_f` decimal companion.
    Exact(Rational),
    Float(Option<f64>),
    Int(u64),
    Text(String),
    Bool(bool),
}

/// Ordered list of named fields.
#[derive(Debug, Clone, Default)]
pub struct Record(Vec<(String, Field)>);

impl Record {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn exact(mut self, name: &str, value: Rational) -> Self {
        self.0.push((name.to_string(), Field::Exact(value)));
        self
    }

    pub fn float(mut self, name: &str, value: Option<f64>) -> Self {
        self.0.push((name.to_string(), Field::Float(value)));
        self
    }

    pub fn int(mut self, name: &str, value: u64) -> Self {
        self.0.push((name.to_string(), Field::Int(value)));
        self
    }

    pub fn text(mut self, name: &str, value: impl Into<String>) -> Self {
        self.0.push((name.to_string(), Field::Text(value.into())));
        self
    }

    pub fn flag(mut self, name: &str, value: bool) -> Self {
        self.0.push((name.to_string(), Field::Bool(value)));
        self
    }

    pub fn extend(mut self, other: Record) -> Self {
        self.0.extend(other.0);
        self
    }

    /// Flattened `(column, cell)` pairs; exact fields expand to two columns.
    fn cells(&self, decimals: Option<usize>) -> Vec<(String, String)> {
        let float = |x: f64| match decimals {
            Some(d) => format!("{x:.d$}"),
            None => format!("{x}"),
        };
        let mut out = Vec::with_capacity(self.0.len() * 2);
        for (name, field) in &self.0 {
            match field {
                Field::Exact(r) => {
                    out.push((name.clone(), r.to_string()));
                    out.push((format!("{name}_f"), float(to_f64(r))));
                }
                Field::Float(x) => out.push((name.clone(), x.map(float).unwrap_or_default())),
                Field::Int(v) => out.push((name.clone(), v.to_string())),
                Field::Text(s) => out.push((name.clone(), s.clone())),
                Field::Bool(b) => out.push((name.clone(), b.to_string())),
            }
        }
        out
    }

    fn to_json(&self) -> Value {
        let mut map = Map::new();
        for (name, field) in &self.0 {
            match field {
                Field::Exact(r) => {
                    map.insert(name.clone(), json!(r.to_string()));
                    map.insert(format!("{name}_f"), json!(to_f64(r)));
                }
                Field::Float(x) => {
                    map.insert(name.clone(), x.map_or(Value::Null, |v| json!(v)));
                }
                Field::Int(v) => {
                    map.insert(name.clone(), json!(v));
                }
                Field::Text(s) => {
                    map.insert(name.clone(), json!(s));
                }
                Field::Bool(b) => {
                    map.insert(name.clone(), json!(b));
                }
            }
        }
        Value::Object(map)
    }
}

/// Everything one subcommand reports.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub params: Record,
    pub summary: Record,
    pub rows: Vec<Record>,
}

impl Report {
    pub fn new(command: &'static str, params: Record) -> Self {
        Self {
            command,
            params,
            summary: Record::new(),
            rows: Vec::new(),
        }
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> io::Result<()> {
        match format {
            Format::Table => self.write_table(out),
            Format::Csv => {
                if self.rows.is_empty() {
                    write_csv(std::slice::from_ref(&self.summary), out)
                } else {
                    write_csv(&self.rows, out)
                }
            }
            Format::Json => {
                let mut doc = Map::new();
                doc.insert("schema_version".into(), json!(SCHEMA_VERSION));
                doc.insert("command".into(), json!(self.command));
                doc.insert("params".into(), self.params.to_json());
                if !self.summary.0.is_empty() {
                    doc.insert("result".into(), self.summary.to_json());
                }
                if !self.rows.is_empty() {
                    doc.insert(
                        "rows".into(),
                        Value::Array(self.rows.iter().map(Record::to_json).collect()),
                    );
                }
                serde_json::to_writer_pretty(&mut *out, &Value::Object(doc))?;
                writeln!(out)
            }
        }
    }

    fn write_table(&self, out: &mut dyn Write) -> io::Result<()> {
        let params: Vec<String> = self
            .params
            .0
            .iter()
            .map(|(name, field)| match field {
                Field::Exact(r) => format!("{name}={r}"),
                Field::Float(x) => format!("{name}={}", x.map(|v| v.to_string()).unwrap_or_default()),
                Field::Int(v) => format!("{name}={v}"),
                Field::Text(s) => format!("{name}={s}"),
                Field::Bool(b) => format!("{name}={b}"),
            })
            .collect();
        writeln!(out, "# {} {}", self.command, params.join(" "))?;

        let width = self.summary.0.iter().map(|(n, _)| n.len()).max().unwrap_or(0);
        for (name, field) in &self.summary.0 {
            match field {
                Field::Exact(r) => writeln!(out, "{name:<width$}  {r}  {:.6}", to_f64(r))?,
                Field::Float(Some(x)) => writeln!(out, "{name:<width$}  {x:.6}")?,
                Field::Float(None) => writeln!(out, "{name:<width$}  n/a")?,
                Field::Int(v) => writeln!(out, "{name:<width$}  {v}")?,
                Field::Text(s) => writeln!(out, "{name:<width$}  {s}")?,
                Field::Bool(b) => writeln!(out, "{name:<width$}  {b}")?,
            }
        }
        if self.rows.is_empty() {
            return Ok(());
        }
        if !self.summary.0.is_empty() {
            writeln!(out)?;
        }
        let rows: Vec<Vec<(String, String)>> = self.rows.iter().map(|r| r.cells(Some(6))).collect();
        let header: Vec<&str> = rows[0].iter().map(|(c, _)| c.as_str()).collect();
        let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
        for row in &rows {
            for (w, (_, cell)) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let line = |cells: Vec<&str>| -> String {
            cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
        };
        writeln!(out, "{}", line(header))?;
        for row in &rows {
            writeln!(out, "{}", line(row.iter().map(|(_, c)| c.as_str()).collect()))?;
        }
        Ok(())
    }
}

fn write_csv(records: &[Record], out: &mut dyn Write) -> io::Result<()> {
    let Some(first) = records.first() else {
        return Ok(());
    };
    let header: Vec<String> = first.cells(None).into_iter().map(|(c, _)| csv_cell(&c)).collect();
    writeln!(out, "{}", header.join(","))?;
    for record in records {
        let cells: Vec<String> = record.cells(None).into_iter().map(|(_, v)| csv_cell(&v)).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

fn csv_cell(value: &str) -> String {
    if value.contains([',', '"', '\n']) {
        format!("\"{}\"", value.replace('"', "\"\""))
    } else {
        value.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use allocgrid::rational::ratio;

    fn sample() -> Report {
        let mut r = Report::new("demo", Record::new().int("n", 5).exact("p", ratio(2, 3)));
        r.summary = Record::new().exact("value", ratio(220, 243)).text("alloc", "1/3,2/3");
        r
    }

    #[test]
    fn table_shows_exact_and_six_decimals() {
        let mut buf = Vec::new();
        sample().write(Format::Table, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("220/243  0.905350"), "{text}");
        assert!(text.starts_with("# demo n=5 p=2/3"));
    }

    #[test]
    fn csv_quotes_commas() {
        let mut buf = Vec::new();
        sample().write(Format::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "value,value_f,alloc");
        assert!(
            lines[1].starts_with("220/243,0.9053497942386831,\"1/3,2/3\""),
            "{}",
            lines[1]
        );
    }

    #[test]
    fn json_has_version_and_companion_decimals() {
        let mut buf = Vec::new();
        sample().write(Format::Json, &mut buf).unwrap();
        let v: Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["schema_version"], json!(SCHEMA_VERSION));
        assert_eq!(v["result"]["value"], json!("220/243"));
        assert!(v["result"]["value_f"].is_f64());
        assert_eq!(v["params"]["p"], json!("2/3"));
    }
}
