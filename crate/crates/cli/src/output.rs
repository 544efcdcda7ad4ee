//! Report emission: a metadata header followed by a CSV table or a JSON
//! document. Nothing time- or host-dependent goes into the file, so a rerun
//! with the echoed configuration reproduces it byte for byte.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};
use zenodark::linalg::{CMat, Mat2};
use zenodark::C64;

use crate::args::{Command, Format};
use crate::error::CliError;

/// Tabular form of a result, one header cell per column.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// What a command produced.
#[derive(Debug, Clone)]
pub struct Report {
    pub table: Table,
    pub data: Value,
    /// Headline numbers, echoed into the metadata and onto stderr.
    pub summary: Map<String, Value>,
}

impl Report {
    pub fn new(table: Table, data: Value) -> Self {
        Self {
            table,
            data,
            summary: Map::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.summary.insert(key.to_owned(), value.into());
        self
    }
}

pub fn metadata(command: &Command, format: Format, report: &Report) -> Value {
    json!({
        "tool": "zenodark",
        "version": env!("CARGO_PKG_VERSION"),
        "format": format,
        "config": command,
        "results": report.summary,
    })
}

pub fn render(command: &Command, format: Format, report: &Report) -> Result<Vec<u8>, CliError> {
    let meta = metadata(command, format, report);
    match format {
        Format::Json => {
            let doc = json!({ "metadata": meta, "data": report.data });
            let mut out = serde_json::to_vec_pretty(&doc)?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            let mut out = Vec::new();
            writeln!(out, "# zenodark {}", env!("CARGO_PKG_VERSION")).map_err(io_err)?;
            writeln!(out, "# metadata: {}", serde_json::to_string(&meta)?).map_err(io_err)?;
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(&report.table.header)?;
            for row in &report.table.rows {
                w.write_record(row)?;
            }
            w.flush().map_err(io_err)?;
            drop(w);
            Ok(out)
        }
    }
}

fn io_err(e: io::Error) -> CliError {
    CliError::Io {
        context: "formatting output".into(),
        source: e,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Destination {
    Stdout,
    File(PathBuf),
}

/// `--out` wins; a directory (existing, or spelled with a trailing slash)
/// receives `<command>.<ext>`. Without `--out` the environment directory is
/// used, and stdout otherwise.
pub fn destination(
    out: Option<&Path>,
    env_dir: Option<&Path>,
    command: &str,
    format: Format,
) -> Destination {
    let file = format!("{command}.{}", format.extension());
    match (out, env_dir) {
        (Some(p), _) => {
            let as_dir = p.is_dir() || p.as_os_str().to_string_lossy().ends_with('/');
            Destination::File(if as_dir {
                p.join(file)
            } else {
                p.to_path_buf()
            })
        }
        (None, Some(d)) if !d.as_os_str().is_empty() => Destination::File(d.join(file)),
        _ => Destination::Stdout,
    }
}

pub fn write(dest: &Destination, bytes: &[u8]) -> Result<(), CliError> {
    match dest {
        Destination::Stdout => {
            let mut s = io::stdout().lock();
            s.write_all(bytes)
                .and_then(|_| s.flush())
                .map_err(|e| CliError::Io {
                    context: "writing to stdout".into(),
                    source: e,
                })
        }
        Destination::File(p) => {
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(parent).map_err(|e| CliError::Io {
                    context: format!("creating {}", parent.display()),
                    source: e,
                })?;
            }
            fs::write(p, bytes).map_err(|e| CliError::Io {
                context: format!("writing {}", p.display()),
                source: e,
            })
        }
    }
}

// -- value helpers

pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn complex(z: C64) -> Value {
    json!([z.re, z.im])
}

/// Row-major nested `[re, im]` pairs.
pub fn matrix(m: &CMat) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| complex(m[(i, j)])).collect()))
            .collect(),
    )
}

pub fn matrix2(m: &Mat2) -> Value {
    json!([
        [complex(m[(0, 0)]), complex(m[(0, 1)])],
        [complex(m[(1, 0)]), complex(m[(1, 1)])]
    ])
}

/// One array of `[re, im]` pairs per column.
pub fn columns(m: &CMat) -> Value {
    Value::Array(
        (0..m.ncols())
            .map(|j| Value::Array(m.column(j).iter().map(|z| complex(*z)).collect()))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn destination_rules() {
        let tmp = std::env::temp_dir();
        assert_eq!(
            destination(None, None, "basis", Format::Csv),
            Destination::Stdout
        );
        assert_eq!(
            destination(Some(&tmp), None, "basis", Format::Csv),
            Destination::File(tmp.join("basis.csv"))
        );
        assert_eq!(
            destination(Some(Path::new("x/y.dat")), Some(&tmp), "basis", Format::Csv),
            Destination::File(PathBuf::from("x/y.dat"))
        );
        assert_eq!(
            destination(None, Some(Path::new("runs")), "sweep", Format::Json),
            Destination::File(PathBuf::from("runs/sweep.json"))
        );
    }
}
