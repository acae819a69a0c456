//! Tables, headers and the two output formats.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::ValueEnum;
use rprun_core::experiments::LongRow;
use serde_json::{json, Map, Value};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    U(u64),
    I(i64),
    F(f64),
    S(String),
    Null,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::U(v) => v.to_string(),
            Cell::I(v) => v.to_string(),
            Cell::F(v) if v.is_nan() => String::new(),
            Cell::F(v) if v.is_infinite() => if *v > 0.0 { "inf" } else { "-inf" }.into(),
            Cell::F(v) => v.to_string(),
            Cell::S(s) => s.clone(),
            Cell::Null => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::U(v) => json!(v),
            Cell::I(v) => json!(v),
            Cell::F(v) if v.is_nan() => Value::Null,
            Cell::F(v) if v.is_infinite() => json!(if *v > 0.0 { "inf" } else { "-inf" }),
            Cell::F(v) => json!(v),
            Cell::S(s) => json!(s),
            Cell::Null => Value::Null,
        }
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::U(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::U(v as u64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::I(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::F(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::S(v.into())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::S(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Null, Into::into)
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub name: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &'static str, columns: &[&'static str]) -> Self {
        Table {
            name,
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// `statistic,value` table.
    pub fn summary(name: &'static str, stats: Vec<(&str, Cell)>) -> Self {
        let mut t = Table::new(name, &["statistic", "value"]);
        for (k, v) in stats {
            t.push(vec![k.into(), v]);
        }
        t
    }

    pub fn long(name: &'static str, rows: &[LongRow]) -> Self {
        let mut t = Table::new(name, &["k", "source", "label", "statistic", "value"]);
        for r in rows {
            t.push(vec![
                r.k.into(),
                r.source.as_str().into(),
                r.label.map(|l| l.name()).into(),
                r.statistic.as_str().into(),
                r.value.into(),
            ]);
        }
        t
    }
}

/// What every output begins with.
#[derive(Debug, Clone)]
pub struct Header {
    pub command: &'static str,
    pub seed: u64,
    pub config: Vec<(String, String)>,
    pub timestamp: Option<u64>,
}

impl Header {
    pub fn new(
        command: &'static str,
        seed: u64,
        config: Vec<(String, String)>,
        deterministic: bool,
    ) -> Self {
        let timestamp = (!deterministic).then(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        });
        Header {
            command,
            seed,
            config,
            timestamp,
        }
    }

    fn comment_lines(&self, table: &str) -> Vec<String> {
        let mut lines = vec![
            format!("rprun {}", env!("CARGO_PKG_VERSION")),
            format!("command: {}", self.command),
            format!("table: {table}"),
            format!("seed: {}", self.seed),
        ];
        lines.extend(self.config.iter().map(|(k, v)| format!("config: {k}={v}")));
        if let Some(t) = self.timestamp {
            lines.push(format!("timestamp: {t}"));
        }
        lines
    }

    fn json(&self, table: &str) -> Value {
        let config: Map<String, Value> = self
            .config
            .iter()
            .map(|(k, v)| (k.clone(), json!(v)))
            .collect();
        let mut meta = json!({
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "table": table,
            "seed": self.seed,
            "config": config,
        });
        if let Some(t) = self.timestamp {
            meta["timestamp"] = json!(t);
        }
        meta
    }
}

fn render(header: &Header, table: &Table, format: Format, out: &mut dyn Write) -> io::Result<()> {
    match format {
        Format::Csv => {
            for line in header.comment_lines(table.name) {
                writeln!(out, "# {line}")?;
            }
            let mut w = csv::Writer::from_writer(out);
            w.write_record(&table.columns)?;
            for row in &table.rows {
                w.write_record(row.iter().map(Cell::csv))?;
            }
            w.flush()
        }
        Format::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|row| {
                    let m: Map<String, Value> = table
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| ((*c).to_string(), v.json()))
                        .collect();
                    Value::Object(m)
                })
                .collect();
            let doc =
                json!({ "meta": header.json(table.name), "columns": table.columns, "rows": rows });
            serde_json::to_writer_pretty(&mut *out, &doc)?;
            writeln!(out)
        }
    }
}

fn extension(format: Format) -> &'static str {
    match format {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

/// Writes to stdout, to the file `out` (one table), or into the directory
/// `out` as `<table>.<ext>` (several tables).
pub fn emit(
    header: &Header,
    tables: &[Table],
    format: Format,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let io_err = |path: &Path, e: io::Error| CliError::Io(format!("{}: {e}", path.display()));
    match out {
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            for (i, t) in tables.iter().enumerate() {
                if i > 0 {
                    writeln!(lock).map_err(|e| io_err(Path::new("<stdout>"), e))?;
                }
                render(header, t, format, &mut lock)
                    .map_err(|e| io_err(Path::new("<stdout>"), e))?;
            }
            Ok(())
        }
        Some(path) => {
            let targets: Vec<(PathBuf, &Table)> = if tables.len() == 1 {
                if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
                }
                vec![(path.to_path_buf(), &tables[0])]
            } else {
                fs::create_dir_all(path).map_err(|e| io_err(path, e))?;
                tables
                    .iter()
                    .map(|t| (path.join(format!("{}.{}", t.name, extension(format))), t))
                    .collect()
            };
            for (p, t) in targets {
                let file = fs::File::create(&p).map_err(|e| io_err(&p, e))?;
                let mut w = io::BufWriter::new(file);
                render(header, t, format, &mut w)
                    .and_then(|_| w.flush())
                    .map_err(|e| io_err(&p, e))?;
            }
            Ok(())
        }
    }
}
