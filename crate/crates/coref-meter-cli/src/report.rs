//! Report emission: every artifact carries the tool version and a hash of
//! the semantic configuration, files are replaced atomically, and the
//! Markdown renderers are pure functions of the JSON value they render.
//!
//! JSON object reports get the provenance keys merged into the top-level
//! object. Line-oriented outputs get a `{"meta": {...}}` first line
//! instead; readers in this binary skip such lines, and the payload
//! records never start with that key.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

pub const REPORT_VERSION: &str = "1";

/// Identity of one run: the subcommand plus its semantic parameters
/// (inputs, seed, options). Delivery choices (`--out`, `--threads`,
/// `--format`) stay out so they cannot change a report's hash.
pub struct RunMeta {
    pub command: &'static str,
    pub params: Value,
}

impl RunMeta {
    pub fn new(command: &'static str, params: Value) -> Self {
        RunMeta { command, params }
    }

    pub fn config_hash(&self) -> String {
        let canon = serde_json::json!({ "command": self.command, "params": self.params });
        let mut hasher = Sha256::new();
        hasher.update(serde_json::to_string(&canon).expect("config serializes").as_bytes());
        let digest = hasher.finalize();
        let mut hex = String::with_capacity(64);
        for b in digest {
            hex.push_str(&format!("{b:02x}"));
        }
        hex
    }

    fn envelope(&self) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("tool".into(), Value::from("coref-meter"));
        m.insert("tool_version".into(), Value::from(env!("CARGO_PKG_VERSION")));
        m.insert("report_version".into(), Value::from(REPORT_VERSION));
        m.insert("command".into(), Value::from(self.command));
        m.insert("config_hash".into(), Value::from(self.config_hash()));
        m
    }

    /// The payload object with provenance keys merged in. serde_json maps
    /// are sorted, so the result serializes deterministically.
    pub fn wrap(&self, payload: Value) -> Value {
        let mut obj = match payload {
            Value::Object(o) => o,
            other => {
                let mut m = Map::new();
                m.insert("result".into(), other);
                m
            }
        };
        for (k, v) in self.envelope() {
            obj.insert(k, v);
        }
        Value::Object(obj)
    }

    /// First line of a line-oriented output. `extra` lands inside the
    /// meta object (stats, warnings counts and the like).
    pub fn meta_line(&self, extra: Value) -> String {
        let mut meta = self.envelope();
        if let Value::Object(o) = extra {
            for (k, v) in o {
                meta.insert(k, v);
            }
        }
        let mut line = Map::new();
        line.insert("meta".into(), Value::Object(meta));
        serde_json::to_string(&Value::Object(line)).expect("meta serializes")
    }
}

/// Drops `{"meta": ...}` lines so lib parsers see only payload records.
pub fn strip_meta_lines(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for line in text.lines() {
        if line.trim_start().starts_with("{\"meta\"") {
            continue;
        }
        out.push_str(line);
        out.push('\n');
    }
    out
}

/// Writes to `--out` atomically (temp file in the same directory, then
/// rename) or to stdout when no path was given.
pub fn deliver(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)
                .with_context(|| format!("cannot create a temporary file next to {}", path.display()))?;
            tmp.write_all(text.as_bytes())
                .with_context(|| format!("cannot write {}", path.display()))?;
            tmp.persist(path).with_context(|| format!("cannot replace {}", path.display()))?;
            Ok(())
        }
    }
}

pub fn to_json_text(report: &Value) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    text
}

/// JSON scalar as Markdown cell text: numbers and booleans print as their
/// JSON token, strings unquoted, null as a dash.
pub fn cell(v: &Value) -> String {
    match v {
        Value::Null => "-".to_string(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn md_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&format!("| {} |\n", headers.join(" | ")));
    out.push_str(&format!("|{}\n", " --- |".repeat(headers.len())));
    for row in rows {
        out.push_str(&format!("| {} |\n", row.join(" | ")));
    }
    out
}

/// Provenance footer shared by all Markdown renders; reads the same keys
/// the JSON carries.
pub fn md_footer(report: &Value) -> String {
    format!(
        "\n---\n{} {} · report v{} · config {}\n",
        report["tool"].as_str().unwrap_or("coref-meter"),
        report["tool_version"].as_str().unwrap_or("?"),
        report["report_version"].as_str().unwrap_or("?"),
        report["config_hash"].as_str().unwrap_or("?"),
    )
}
