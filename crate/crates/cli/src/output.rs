use crate::config::{Format, RunConfig};
use serde::Serialize;
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use tangent_spde::Result;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            // shortest representation that round-trips
            Cell::Real(x) => format!("{x:?}"),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Real(x) if x.is_finite() => json!(x),
            Cell::Real(x) => json!(x.to_string()),
            Cell::Text(s) => json!(s),
        }
    }
}

/// A named table of rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&'static str]) -> Self {
        Table {
            name: name.into(),
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Everything a command produces.
#[derive(Debug, Default)]
pub struct Artifacts {
    pub tables: Vec<Table>,
    /// Written as `<command>_summary.json` regardless of the table format.
    pub summary: Option<Value>,
    /// Nonzero exit with status 1 when false.
    pub passed: bool,
}

impl Artifacts {
    pub fn new() -> Self {
        Artifacts {
            passed: true,
            ..Default::default()
        }
    }
}

pub fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn metadata(command: &str, config: &RunConfig) -> Result<Value> {
    Ok(json!({
        "tool": "tangent-spde",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "seed": config.seed,
        "config": serde_json::to_value(config)?,
    }))
}

fn render_csv(table: &Table, command: &str, config: &RunConfig) -> Result<String> {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# tangent-spde {} {}",
        env!("CARGO_PKG_VERSION"),
        command
    );
    let _ = writeln!(out, "# seed: {}", config.seed);
    let _ = writeln!(out, "# config: {}", serde_json::to_string(config)?);
    let _ = writeln!(out, "{}", table.columns.join(","));
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(Cell::csv).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    Ok(out)
}

fn render_json(table: &Table, command: &str, config: &RunConfig) -> Result<String> {
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|r| {
            Value::Object(
                table
                    .columns
                    .iter()
                    .zip(r)
                    .map(|(c, v)| (c.to_string(), v.json()))
                    .collect(),
            )
        })
        .collect();
    let doc = json!({
        "metadata": metadata(command, config)?,
        "columns": table.columns,
        "rows": rows,
    });
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

/// Writes the tables and summary under `dir`, returning the paths written.
pub fn write_artifacts(
    artifacts: &Artifacts,
    command: &str,
    config: &RunConfig,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for table in &artifacts.tables {
        let (text, ext) = match config.output.format {
            Format::Csv => (render_csv(table, command, config)?, "csv"),
            Format::Json => (render_json(table, command, config)?, "json"),
        };
        let path = dir.join(format!("{}.{ext}", table.name));
        fs::write(&path, text)?;
        written.push(path);
    }
    if let Some(summary) = &artifacts.summary {
        let doc = json!({
            "metadata": metadata(command, config)?,
            "summary": summary,
        });
        let path = dir.join(format!("{}_summary.json", command.replace('-', "_")));
        fs::write(&path, serde_json::to_string_pretty(&doc)? + "\n")?;
        written.push(path);
    }
    Ok(written)
}
