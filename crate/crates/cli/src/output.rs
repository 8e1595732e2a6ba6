//! Result records (one JSON object per line) and CSV tables.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::Result;
use serde::Serialize;
use serde_json::{json, Value};
use weylbox::fmt_f64;

pub const VERSION: &str = concat!("weylbox ", env!("CARGO_PKG_VERSION"));

/// What a subcommand hands back.
pub struct Output {
    pub payload: Value,
    /// Header plus rows, or None when the command has no table form.
    pub csv: Option<Csv>,
    pub summary: String,
}

pub struct Csv {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Csv {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, r: Vec<String>) {
        self.rows.push(r);
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|c| quote(c)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

fn quote(c: &str) -> String {
    if c.contains([',', '"', '\n']) {
        format!("\"{}\"", c.replace('"', "\"\""))
    } else {
        c.to_string()
    }
}

pub fn f(x: f64) -> String {
    fmt_f64(x)
}

pub fn join<T: ToString>(xs: &[T], sep: &str) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

pub fn to_value<T: Serialize>(x: &T) -> Result<Value> {
    Ok(serde_json::to_value(x)?)
}

pub fn record(config: &Value, payload: &Value, elapsed: f64) -> Value {
    let ts = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    json!({
        "timestamp": ts,
        "config": config,
        "payload": payload,
        "version": VERSION,
        "elapsed_secs": elapsed,
    })
}

pub fn append_line(path: &Path, line: &str) -> Result<()> {
    let mut fh = OpenOptions::new().create(true).append(true).open(path)?;
    writeln!(fh, "{line}")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quotes_labels() {
        let mut c = Csv::new(&["label", "x"]);
        c.row(vec!["a,b".into(), "1".into()]);
        assert_eq!(c.render(), "label,x\n\"a,b\",1\n");
    }
}
