//! Rendering artifacts with a provenance header.

use std::path::Path;

use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::cli::Format;

/// What a verb produced, before formatting.
pub enum Artifact {
    Table { columns: Vec<String>, rows: Vec<Vec<Value>>, summary: Map<String, Value> },
    /// Digit files, emitted verbatim in CSV mode.
    DigitFile { text: String, json: Value },
}

impl Artifact {
    pub fn table(columns: &[&str], rows: Vec<Vec<Value>>) -> Self {
        Artifact::Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows, summary: Map::new() }
    }

    pub fn with_summary(mut self, key: &str, value: impl Serialize) -> Self {
        if let Artifact::Table { summary, .. } = &mut self {
            summary.insert(key.into(), serde_json::to_value(value).expect("serializable summary"));
        }
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub config_hash: String,
    pub seed: u64,
    pub timestamp: String,
    pub config: Value,
}

impl Provenance {
    pub fn new(config: Value, seed: u64) -> Self {
        Self {
            tool: "besum".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config_hash: config_hash(&config),
            seed,
            timestamp: timestamp(),
            config,
        }
    }

    fn csv_lines(&self) -> String {
        format!(
            "# tool={} {}\n# config_hash={}\n# seed={}\n# timestamp={}\n# config={}\n",
            self.tool, self.version, self.config_hash, self.seed, self.timestamp, self.config
        )
    }
}

/// SHA-256 of the compact JSON form; `serde_json` sorts object keys, so the
/// hash does not depend on flag order.
pub fn config_hash(config: &Value) -> String {
    hex::encode(Sha256::digest(config.to_string().as_bytes()))
}

/// RFC 3339 UTC; `SOURCE_DATE_EPOCH` pins it for reproducible builds.
fn timestamp() -> String {
    let secs = std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|s| s.parse::<i64>().ok());
    let when = match secs.and_then(|s| chrono::DateTime::from_timestamp(s, 0)) {
        Some(t) => t,
        None => chrono::Utc::now(),
    };
    when.to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

/// Format requested explicitly, else by extension, else CSV.
pub fn resolve_format(format: Option<Format>, out: Option<&Path>) -> Format {
    format.unwrap_or_else(|| match out.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
        Some("json") => Format::Json,
        _ => Format::Csv,
    })
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

pub fn render(artifact: &Artifact, format: Format, provenance: &Provenance) -> String {
    match (artifact, format) {
        (Artifact::Table { columns, rows, summary }, Format::Csv) => {
            let mut out = provenance.csv_lines();
            for (k, v) in summary {
                out.push_str(&format!("# {k}={}\n", cell(v)));
            }
            out.push_str(&columns.join(","));
            out.push('\n');
            for row in rows {
                let cells: Vec<String> = row.iter().map(cell).collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
            out
        }
        (Artifact::Table { columns, rows, summary }, Format::Json) => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|row| Value::Object(columns.iter().cloned().zip(row.iter().cloned()).collect()))
                .collect();
            pretty(&json!({ "provenance": provenance, "summary": summary, "rows": rows }))
        }
        (Artifact::DigitFile { text, .. }, Format::Csv) => provenance.csv_lines() + text,
        (Artifact::DigitFile { json, .. }, Format::Json) => pretty(&json!({ "provenance": provenance, "result": json })),
    }
}

pub fn pretty(value: &Value) -> String {
    serde_json::to_string_pretty(value).expect("JSON values always serialize") + "\n"
}
