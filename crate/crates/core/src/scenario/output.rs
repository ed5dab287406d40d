//! Columnar CSV and JSON artifacts.
//!
//! CSV files are comma-separated with a single header row of `name [unit]` labels, LF line
//! endings, and floats in Rust's shortest round-trip form, so the same numbers always print
//! the same bytes. Magnitudes outside `[1e-5, 1e16)` use exponent notation. Units are natural units with `hbar = 1`: `L` length, `T` time.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Column {
    pub name: &'static str,
    /// Empty for dimensionless columns.
    pub unit: &'static str,
}

impl Column {
    pub const fn new(name: &'static str, unit: &'static str) -> Self {
        Self { name, unit }
    }

    fn label(&self) -> String {
        if self.unit.is_empty() {
            self.name.to_string()
        } else {
            format!("{} [{}]", self.name, self.unit)
        }
    }
}

/// A table bound for one CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputFile {
    pub name: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<f64>>,
}

impl OutputFile {
    pub fn new(name: impl Into<String>, columns: Vec<Column>) -> Self {
        Self {
            name: name.into(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

pub fn write_csv<W: Write>(out: W, columns: &[Column], rows: &[Vec<f64>]) -> io::Result<()> {
    let mut out = BufWriter::new(out);
    let header: Vec<String> = columns.iter().map(Column::label).collect();
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                out.write_all(b",")?;
            }
            write_float(&mut out, *v)?;
        }
        out.write_all(b"\n")?;
    }
    out.flush()
}

/// Plain decimal for moderate magnitudes, exponent form otherwise; both are the shortest
/// strings that parse back to the same value.
fn write_float<W: Write>(out: &mut W, v: f64) -> io::Result<()> {
    let a = v.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) || !a.is_finite() {
        write!(out, "{v}")
    } else {
        write!(out, "{v:e}")
    }
}

/// Writes every table into `dir` and returns the file names in order.
pub fn emit_plot_data(dir: &Path, files: &[OutputFile]) -> io::Result<Vec<String>> {
    fs::create_dir_all(dir)?;
    files
        .iter()
        .map(|f| {
            write_csv(fs::File::create(dir.join(&f.name))?, &f.columns, &f.rows)?;
            Ok(f.name.clone())
        })
        .collect()
}

pub(crate) fn write_json<S: Serialize>(path: &Path, value: &S) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
    text.push('\n');
    fs::write(path, text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_shortest_floats() {
        let cols = [Column::new("x", "L"), Column::new("ratio", "")];
        let mut buf = Vec::new();
        write_csv(&mut buf, &cols, &[vec![0.1, 1.0], vec![-2.5e-300, 1.0 / 3.0]]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.split('\n').collect();
        assert_eq!(lines[0], "x [L],ratio");
        assert_eq!(lines[1], "0.1,1");
        let parsed: Vec<f64> = lines[2].split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(parsed, vec![-2.5e-300, 1.0 / 3.0]);
        assert_eq!(lines[2], "-2.5e-300,0.3333333333333333");
        assert_eq!(lines[3], "");
        assert!(!text.contains('\r'));
    }
}
