use std::fs;
use std::path::{Path, PathBuf};

use nhbraid_core::Error;
use serde::Serialize;
use serde_json::{json, Value};

/// Exit status of a failed run.
#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Numerical(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(_) | Error::Parse(_) | Error::OutOfRange(_) => Failure::Validation(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

pub type Outcome<T> = std::result::Result<T, Failure>;

pub fn invalid<T>(msg: impl Into<String>) -> Outcome<T> {
    Err(Failure::Validation(msg.into()))
}

/// Tabular series; the CSV export writes exactly this table.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Series {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Series {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub version: &'static str,
    pub config: Value,
    pub series: Series,
    pub events: Value,
    pub braid: Value,
    pub eps: Value,
    pub diagnostics: Value,
}

impl Report {
    pub fn new(config: Value) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION"),
            config,
            series: Series::default(),
            events: json!([]),
            braid: Value::Null,
            eps: Value::Null,
            diagnostics: json!({}),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Relative paths land under `NHBRAID_OUTPUT_DIR` when it is set.
pub fn resolve(path: &Path) -> PathBuf {
    match std::env::var_os("NHBRAID_OUTPUT_DIR") {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

pub fn render(report: &Report, format: Format) -> Outcome<String> {
    match format {
        Format::Json => serde_json::to_string_pretty(report)
            .map(|s| s + "\n")
            .map_err(|e| Failure::Numerical(format!("serialization failed: {e}"))),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| Failure::Numerical(format!("csv export failed: {e}"));
            w.write_record(&report.series.columns).map_err(io)?;
            for row in &report.series.rows {
                w.write_record(row.iter().map(cell)).map_err(io)?;
            }
            let bytes = w.into_inner().map_err(|e| Failure::Numerical(format!("csv export failed: {e}")))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
    }
}

pub fn emit(report: &Report, format: Format, output: Option<&Path>) -> Outcome<()> {
    let text = render(report, format)?;
    match output {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(p) => {
            let p = resolve(p);
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| Failure::Numerical(format!("{}: {e}", dir.display())))?;
            }
            fs::write(&p, text).map_err(|e| Failure::Numerical(format!("{}: {e}", p.display())))
        }
    }
}
