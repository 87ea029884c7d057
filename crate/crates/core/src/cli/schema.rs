use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::Deserialize;
use serde_json::Value;

use crate::cli::RunConfig;
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// The shipped schema: required result keys and CSV columns per command.
pub const SCHEMA_TEXT: &str = include_str!("../../schemas/reports.json");

#[derive(Deserialize)]
struct CommandSchema {
    result_keys: Vec<String>,
    csv_columns: Option<Vec<String>>,
}

#[derive(Deserialize)]
struct Schema {
    schema_version: u32,
    commands: BTreeMap<String, CommandSchema>,
}

fn schema() -> &'static Schema {
    static S: OnceLock<Schema> = OnceLock::new();
    S.get_or_init(|| {
        let s: Schema = serde_json::from_str(SCHEMA_TEXT).expect("shipped schema parses");
        assert_eq!(s.schema_version, SCHEMA_VERSION);
        s
    })
}

fn command(name: &str) -> Result<&'static CommandSchema> {
    schema()
        .commands
        .get(name)
        .ok_or_else(|| Error::Parse(format!("no schema for command '{name}'")))
}

pub fn commands() -> Vec<&'static str> {
    schema().commands.keys().map(String::as_str).collect()
}

pub fn csv_columns(name: &str) -> Result<Option<Vec<String>>> {
    Ok(command(name)?.csv_columns.clone())
}

/// Checks a JSON report against the schema and returns its config.
pub fn validate_report(text: &str) -> Result<RunConfig> {
    let v: Value = serde_json::from_str(text)?;
    let bad = |msg: String| Error::Parse(format!("report: {msg}"));
    let obj = v.as_object().ok_or_else(|| bad("not an object".into()))?;
    let mut keys: Vec<&str> = obj.keys().map(String::as_str).collect();
    keys.sort_unstable();
    if keys != ["config", "result", "schema_version", "status", "version"] {
        return Err(bad(format!("unexpected top-level keys {keys:?}")));
    }
    if obj["schema_version"] != SCHEMA_VERSION {
        return Err(bad(format!("schema_version {}", obj["schema_version"])));
    }
    if !obj["version"].as_str().is_some_and(|s| s.starts_with("fcstar ")) {
        return Err(bad("missing version stamp".into()));
    }
    if !matches!(obj["status"].as_str(), Some("ok" | "falsified")) {
        return Err(bad(format!("status {}", obj["status"])));
    }
    let config: RunConfig = serde_json::from_value(obj["config"].clone())?;
    let result = obj["result"].as_object().ok_or_else(|| bad("result is not an object".into()))?;
    for key in &command(&config.command)?.result_keys {
        if !result.contains_key(key) {
            return Err(bad(format!("result lacks '{key}'")));
        }
    }
    Ok(config)
}

/// Checks a CSV report's header and row widths against the schema.
pub fn validate_csv(name: &str, text: &str) -> Result<usize> {
    let columns = csv_columns(name)?.ok_or_else(|| Error::Parse(format!("'{name}' has no CSV output")))?;
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let wrap = |e: csv::Error| Error::Parse(format!("csv: {e}"));
    let header: Vec<String> = r.headers().map_err(wrap)?.iter().map(String::from).collect();
    if header != columns {
        return Err(Error::Parse(format!("csv header {header:?}, expected {columns:?}")));
    }
    let mut rows = 0;
    for rec in r.records() {
        rec.map_err(wrap)?;
        rows += 1;
    }
    Ok(rows)
}
