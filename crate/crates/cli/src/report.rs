//! Report model shared by every subcommand, rendered as text, CSV or JSON.

use std::fmt::Write as _;

use clap::ValueEnum;
use ntangle_core::io::fmt_f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Num(f64),
    Text(String),
    Bool(bool),
}

impl Value {
    fn plain(&self) -> String {
        match self {
            Value::Int(v) => v.to_string(),
            Value::Num(v) => fmt_f64(*v),
            Value::Text(v) => v.clone(),
            Value::Bool(v) => v.to_string(),
        }
    }

    fn json(&self) -> String {
        match self {
            Value::Num(v) if !v.is_finite() => "null".to_string(),
            Value::Text(v) => serde_json::Value::String(v.clone()).to_string(),
            other => other.plain(),
        }
    }

    fn csv(&self) -> String {
        let s = self.plain();
        if s.contains([',', '"', '\n']) {
            format!("\"{}\"", s.replace('"', "\"\""))
        } else {
            s
        }
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Num(v)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}

impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::Int(v as i64)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub kind: String,
    pub fields: Vec<(String, Value)>,
}

impl Record {
    pub fn new(kind: &str) -> Self {
        Self { kind: kind.to_string(), fields: Vec::new() }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.fields.push((key.to_string(), value.into()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    fn keys(&self) -> Vec<&str> {
        self.fields.iter().map(|(k, _)| k.as_str()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub records: Vec<Record>,
    pub passed: bool,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self { command: command.to_string(), records: Vec::new(), passed: true }
    }

    pub fn push(&mut self, record: Record) {
        self.records.push(record);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text(),
            Format::Csv => self.csv(),
            Format::Json => self.json(),
        }
    }

    fn status(&self) -> &'static str {
        if self.passed {
            "pass"
        } else {
            "fail"
        }
    }

    fn text(&self) -> String {
        let mut out = format!("ntangle {}\n", self.command);
        for r in &self.records {
            let width = r.fields.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            let _ = writeln!(out, "\n[{}]", r.kind);
            for (k, v) in &r.fields {
                let _ = writeln!(out, "  {k:<width$} = {}", v.plain());
            }
        }
        let _ = writeln!(out, "\nstatus: {}", self.status());
        out
    }

    /// Consecutive records with the same kind and keys share one header.
    fn csv(&self) -> String {
        let mut out = String::new();
        let mut last: Option<(&str, Vec<&str>)> = None;
        for r in &self.records {
            let shape = (r.kind.as_str(), r.keys());
            if last.as_ref() != Some(&shape) {
                if last.is_some() {
                    out.push('\n');
                }
                out.push_str(&shape.1.join(","));
                out.push('\n');
                last = Some(shape);
            }
            let cells: Vec<String> = r.fields.iter().map(|(_, v)| v.csv()).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn json(&self) -> String {
        let records: Vec<String> = self
            .records
            .iter()
            .map(|r| {
                let mut parts = vec![format!("\"record\": {}", Value::Text(r.kind.clone()).json())];
                parts.extend(r.fields.iter().map(|(k, v)| format!("{}: {}", Value::Text(k.clone()).json(), v.json())));
                format!("    {{{}}}", parts.join(", "))
            })
            .collect();
        format!(
            "{{\n  \"command\": {},\n  \"status\": \"{}\",\n  \"records\": [\n{}\n  ]\n}}\n",
            Value::Text(self.command.clone()).json(),
            self.status(),
            records.join(",\n")
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new("demo");
        r.push(Record::new("row").with("i", 1usize).with("x", 0.5));
        r.push(Record::new("row").with("i", 2usize).with("x", f64::NAN));
        r.push(Record::new("note").with("text", "a, \"b\""));
        r
    }

    #[test]
    fn csv_groups_and_quotes() {
        let csv = sample().render(Format::Csv);
        assert_eq!(csv, "i,x\n1,5.0000000000000000e-1\n2,NaN\n\ntext\n\"a, \"\"b\"\"\"\n");
    }

    #[test]
    fn json_is_valid() {
        let json = sample().render(Format::Json);
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed["records"][0]["x"], 0.5);
        assert!(parsed["records"][1]["x"].is_null());
        assert_eq!(parsed["status"], "pass");
    }

    #[test]
    fn text_lists_fields() {
        let text = sample().render(Format::Text);
        assert!(text.contains("[row]\n  i = 1\n  x = 5.0000000000000000e-1"));
        assert!(text.ends_with("status: pass\n"));
    }
}
