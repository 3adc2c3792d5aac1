//! Tables and their CSV/JSON rendering.
//!
//! Floats are rounded to the requested number of significant digits and then
//! printed in their shortest round-trip form, so equal results always produce
//! equal bytes.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use crate::args::{Format, OutputSettings};
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
    /// Quantity not defined for this row; empty in CSV, `null` in JSON.
    Missing,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::Int(x)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map_or(Cell::Missing, Into::into)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Everything a command produces.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: &'static str,
    /// Scalar results and parameters; written as a `metadata` table in CSV.
    pub metadata: Vec<(String, Value)>,
    /// The first table is the primary output.
    pub tables: Vec<Table>,
    /// Structured detail included only in JSON output.
    pub details: Option<Value>,
    /// Human-readable summary lines for stderr.
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Self { command, metadata: Vec::new(), tables: Vec::new(), details: None, notes: Vec::new() }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<Value>) {
        self.metadata.push((key.into(), value.into()));
    }
}

/// Rounds to `digits` significant digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    let rounded: f64 = format!("{:.*e}", digits - 1, x).parse().expect("formatted float parses");
    // Collapse −0 so sign noise cannot change the output.
    if rounded == 0.0 {
        0.0
    } else {
        rounded
    }
}

/// Shortest round-trip text of `x` after rounding.
pub fn format_float(x: f64, digits: usize) -> String {
    let r = round_sig(x, digits);
    if r.is_nan() {
        return "NaN".into();
    }
    if r.is_infinite() {
        return if r > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let a = r.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

fn cell_text(cell: &Cell, digits: usize) -> String {
    match cell {
        Cell::Int(i) => i.to_string(),
        Cell::Float(x) => format_float(*x, digits),
        Cell::Text(s) => s.clone(),
        Cell::Bool(b) => b.to_string(),
        Cell::Missing => String::new(),
    }
}

fn round_json(v: &Value, digits: usize) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().expect("f64 number"), digits);
            serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.iter().map(|x| round_json(x, digits)).collect()),
        Value::Object(map) => Value::Object(map.iter().map(|(k, x)| (k.clone(), round_json(x, digits))).collect()),
        other => other.clone(),
    }
}

fn cell_json(cell: &Cell, digits: usize) -> Value {
    match cell {
        Cell::Int(i) => Value::from(*i),
        Cell::Float(x) => serde_json::Number::from_f64(round_sig(*x, digits)).map_or(Value::Null, Value::Number),
        Cell::Text(s) => Value::from(s.clone()),
        Cell::Bool(b) => Value::from(*b),
        Cell::Missing => Value::Null,
    }
}

fn metadata_table(report: &Report) -> Option<Table> {
    if report.metadata.is_empty() {
        return None;
    }
    let mut table = Table::new("metadata", &["key", "value"]);
    for (k, v) in &report.metadata {
        let value = match v {
            Value::Null => Cell::Missing,
            Value::Bool(b) => Cell::Bool(*b),
            Value::Number(n) if n.is_f64() => Cell::Float(n.as_f64().expect("f64 number")),
            Value::Number(n) => Cell::Text(n.to_string()),
            Value::String(s) => Cell::Text(s.clone()),
            other => Cell::Text(other.to_string()),
        };
        table.push(vec![Cell::Text(k.clone()), value]);
    }
    Some(table)
}

pub fn render_csv(table: &Table, digits: usize) -> CliResult<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Validation(format!("CSV output: {e}"));
    w.write_record(&table.columns).map_err(io)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|c| cell_text(c, digits))).map_err(io)?;
    }
    w.into_inner().map_err(|e| CliError::Validation(format!("CSV output: {e}")))
}

pub fn render_json(report: &Report, digits: usize) -> Vec<u8> {
    let mut doc = Map::new();
    doc.insert("command".into(), Value::from(report.command));
    let meta: Map<String, Value> = report.metadata.iter().map(|(k, v)| (k.clone(), round_json(v, digits))).collect();
    doc.insert("metadata".into(), Value::Object(meta));
    let mut tables = Map::new();
    for t in &report.tables {
        let rows: Vec<Value> =
            t.rows.iter().map(|r| Value::Array(r.iter().map(|c| cell_json(c, digits)).collect())).collect();
        let mut entry = Map::new();
        entry.insert("columns".into(), Value::from(t.columns.clone()));
        entry.insert("rows".into(), Value::Array(rows));
        tables.insert(t.name.clone(), Value::Object(entry));
    }
    doc.insert("tables".into(), Value::Object(tables));
    if let Some(details) = &report.details {
        doc.insert("details".into(), round_json(details, digits));
    }
    let mut out = serde_json::to_vec_pretty(&Value::Object(doc)).expect("JSON values serialize");
    out.push(b'\n');
    out
}

/// `dir/stem.table.ext` next to `path`.
pub fn sibling_path(path: &Path, table: &str) -> PathBuf {
    let stem = path.file_stem().map_or_else(|| "output".into(), |s| s.to_string_lossy().into_owned());
    let name = match path.extension() {
        Some(ext) => format!("{stem}.{table}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{table}"),
    };
    path.with_file_name(name)
}

/// Writes via a temporary file in the same directory and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let err = |e: std::io::Error| CliError::Validation(format!("cannot write {}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(err)?;
    tmp.write_all(bytes).map_err(err)?;
    tmp.as_file().sync_all().map_err(err)?;
    tmp.persist(path).map_err(|e| err(e.error))?;
    Ok(())
}

/// Emits the report to stdout or files as configured.
///
/// CSV to stdout prints a single table bare; several tables are separated by
/// a blank line and each is preceded by a `# <name>` line. CSV to a file puts
/// the primary table in the file and the rest in sibling files.
pub fn emit(report: &Report, settings: &OutputSettings) -> CliResult<()> {
    let digits = settings.precision;
    match settings.format {
        Format::Json => {
            let bytes = render_json(report, digits);
            match &settings.output {
                Some(path) => write_atomic(path, &bytes),
                None => write_stdout(&bytes),
            }
        }
        Format::Csv => {
            let mut tables: Vec<&Table> = report.tables.iter().collect();
            let meta = metadata_table(report);
            tables.extend(meta.as_ref());
            match &settings.output {
                Some(path) => {
                    for (k, t) in tables.iter().enumerate() {
                        let target = if k == 0 { path.clone() } else { sibling_path(path, &t.name) };
                        write_atomic(&target, &render_csv(t, digits)?)?;
                    }
                    Ok(())
                }
                None => {
                    let mut out = Vec::new();
                    if tables.len() == 1 {
                        out = render_csv(tables[0], digits)?;
                    } else {
                        for (k, t) in tables.iter().enumerate() {
                            if k > 0 {
                                out.push(b'\n');
                            }
                            out.extend_from_slice(format!("# {}\n", t.name).as_bytes());
                            out.extend(render_csv(t, digits)?);
                        }
                    }
                    write_stdout(&out)
                }
            }
        }
    }
}

fn write_stdout(bytes: &[u8]) -> CliResult<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(bytes)
        .and_then(|_| out.flush())
        .map_err(|e| CliError::Validation(format!("cannot write stdout: {e}")))
}
