//! CSV formatting and output destinations.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::config::{Format, RunConfig};
use crate::error::CliError;

/// Comma-separated table with a single header line. Axis columns use the
/// shortest round-trip decimal form; computed values use scientific
/// notation with `precision` fractional digits.
#[derive(Debug, Clone)]
pub struct CsvTable {
    precision: usize,
    text: String,
}

impl CsvTable {
    pub fn new<S: AsRef<str>>(header: &[S], precision: usize) -> Self {
        let mut text = header
            .iter()
            .map(|h| h.as_ref())
            .collect::<Vec<_>>()
            .join(",");
        text.push('\n');
        Self { precision, text }
    }

    pub fn value(&self, v: f64) -> String {
        format_value(v, self.precision)
    }

    pub fn push_row(&mut self, cells: &[String]) {
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

pub fn format_value(v: f64, precision: usize) -> String {
    if v == 0.0 {
        // Avoid a "-0" cell.
        return format!("{:.*e}", precision, 0.0);
    }
    format!("{:.*e}", precision, v)
}

/// Shortest decimal form that round-trips; used for axes and header labels.
pub fn format_axis(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    format!("{v}")
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

pub fn write_stdout(contents: &str) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    out.write_all(contents.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| CliError::io("<stdout>", e))
}

/// Where a figure command sends its artifacts.
#[derive(Debug, Clone, PartialEq)]
pub struct Destinations {
    /// `None` means stdout.
    pub csv: Option<Option<PathBuf>>,
    pub svg: Option<PathBuf>,
}

impl Destinations {
    pub fn resolve(cfg: &RunConfig) -> Result<Self, CliError> {
        let out = cfg.output_path.clone();
        match (cfg.format, out) {
            (Format::Csv, out) => Ok(Self {
                csv: Some(out),
                svg: None,
            }),
            (Format::Svg, Some(p)) => Ok(Self {
                csv: None,
                svg: Some(if p.extension().is_some() {
                    p
                } else {
                    p.with_extension("svg")
                }),
            }),
            (Format::Both, Some(p)) => Ok(Self {
                csv: Some(Some(p.with_extension("csv"))),
                svg: Some(p.with_extension("svg")),
            }),
            (_, None) => Err(CliError::Usage("--format svg/both needs --out".into())),
        }
    }

    /// True when the CSV is written to stdout, so status text must go
    /// elsewhere.
    pub fn csv_on_stdout(&self) -> bool {
        matches!(self.csv, Some(None))
    }

    pub fn emit(&self, csv: &str, svg: impl FnOnce() -> String) -> Result<(), CliError> {
        match &self.csv {
            Some(Some(path)) => write_file(path, csv)?,
            Some(None) => write_stdout(csv)?,
            None => {}
        }
        if let Some(path) = &self.svg {
            write_file(path, &svg())?;
        }
        Ok(())
    }

    /// Prints a summary line where it cannot corrupt CSV on stdout.
    pub fn note(&self, line: &str) {
        if self.csv_on_stdout() {
            eprintln!("{line}");
        } else {
            println!("{line}");
        }
    }
}
