//! Report rendering. Every command builds a JSON value; CSV and text are
//! derived from it unless the command supplies a table of its own.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

pub struct Report {
    pub json: Value,
    pub csv: Option<String>,
    pub text: Option<String>,
}

impl Report {
    pub fn new(json: Value) -> Self {
        Self {
            json,
            csv: None,
            text: None,
        }
    }

    pub fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }

    pub fn with_text(mut self, text: String) -> Self {
        self.text = Some(text);
        self
    }

    pub fn render(&self, format: Format) -> Result<String> {
        Ok(match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json)?;
                s.push('\n');
                s
            }
            Format::Csv => match &self.csv {
                Some(csv) => csv.clone(),
                None => {
                    let mut out = String::from("key,value\n");
                    for (k, v) in flatten(&self.json) {
                        out.push_str(&format!("{},{}\n", csv_field(&k), csv_field(&v)));
                    }
                    out
                }
            },
            Format::Text => match &self.text {
                Some(text) => text.clone(),
                None => flatten(&self.json)
                    .into_iter()
                    .map(|(k, v)| format!("{k}: {v}\n"))
                    .collect(),
            },
        })
    }

    pub fn emit(&self, format: Format, out: Option<&Path>) -> Result<()> {
        let body = self.render(format)?;
        match out {
            Some(path) => {
                fs::write(path, body).with_context(|| format!("cannot write {}", path.display()))
            }
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(body.as_bytes())?;
                Ok(stdout.flush()?)
            }
        }
    }
}

pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Dotted-path leaves of a JSON value, in document order.
pub fn flatten(v: &Value) -> Vec<(String, String)> {
    let mut out = Vec::new();
    walk(v, String::new(), &mut out);
    out
}

fn walk(v: &Value, path: String, out: &mut Vec<(String, String)>) {
    let join = |k: &str| {
        if path.is_empty() {
            k.to_string()
        } else {
            format!("{path}.{k}")
        }
    };
    match v {
        Value::Object(map) if !map.is_empty() => {
            for (k, x) in map {
                walk(x, join(k), out);
            }
        }
        Value::Array(items) if items.iter().any(|x| x.is_object() || x.is_array()) => {
            for (i, x) in items.iter().enumerate() {
                walk(x, join(&i.to_string()), out);
            }
        }
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(scalar).collect();
            out.push((path, format!("[{}]", parts.join(" "))));
        }
        _ => out.push((path, scalar(v))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
