use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::args::{Command, Format};
use crate::error::CliError;

/// The invoking configuration, embedded in every output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub tool: String,
    pub version: String,
    #[serde(flatten)]
    pub command: Command,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig { tool: "jointspec".into(), version: env!("CARGO_PKG_VERSION").into(), command }
    }
}

/// A flat table for CSV output.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Table { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// A command's result in both renderings.
pub struct Report {
    pub json: Value,
    pub table: Table,
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn render(config: &RunConfig, report: &Report, format: Format) -> Result<String, CliError> {
    let config_json = serde_json::to_value(config).map_err(|e| CliError::Internal(e.to_string()))?;
    match format {
        Format::Json => {
            let doc = serde_json::json!({ "config": config_json, "result": report.json });
            let mut s = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Internal(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let mut s = format!("# config: {}\n", serde_json::to_string(&config_json).expect("value serializes"));
            s.push_str(&report.table.header.join(","));
            s.push('\n');
            for row in &report.table.rows {
                let cells: Vec<String> = row.iter().map(|c| csv_field(c)).collect();
                s.push_str(&cells.join(","));
                s.push('\n');
            }
            Ok(s)
        }
    }
}

/// Writes through a temporary file in the destination directory and renames
/// it into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

pub fn emit(path: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match path {
        Some(p) => write_atomic(p, contents),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(contents.as_bytes()).map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

/// Recovers the configuration from a JSON or CSV output document.
pub fn parse_config(text: &str) -> Result<RunConfig, String> {
    if let Some(rest) = text.strip_prefix("# config: ") {
        let line = rest.lines().next().unwrap_or("");
        return serde_json::from_str(line).map_err(|e| e.to_string());
    }
    let doc: Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    serde_json::from_value(doc["config"].clone()).map_err(|e| e.to_string())
}
