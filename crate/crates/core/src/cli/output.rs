//! CSV tables with `#`-prefixed metadata.
//!
//! Numbers are written as `{:.16e}` (17 significant digits) so values
//! round-trip exactly.

use std::fmt::Write as _;
use std::time::{SystemTime, UNIX_EPOCH};

use super::config::{RunConfig, CONFIG_PREFIX};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

/// What goes above the column header.
#[derive(Debug, Clone)]
pub struct OutputMeta {
    pub command: String,
    pub reproducible: bool,
    pub extra: Vec<String>,
}

impl OutputMeta {
    pub fn new(command: &str, reproducible: bool) -> Self {
        Self {
            command: command.to_string(),
            reproducible,
            extra: Vec::new(),
        }
    }

    pub fn lines(&self, cfg: &RunConfig, index: usize) -> Vec<String> {
        let mut out = vec![
            format!("# optoacoustic {}", env!("CARGO_PKG_VERSION")),
            format!("# command = {}", self.command),
        ];
        if !self.reproducible {
            let secs = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            out.push(format!("# generated_unix_s = {secs}"));
        }
        out.extend(cfg.resolved_lines(index).into_iter().map(|l| format!("{CONFIG_PREFIX}{l}")));
        out.extend(cfg.derived_lines(index).into_iter().map(|l| format!("# derived {l}")));
        out.extend(self.extra.iter().map(|l| format!("# {l}")));
        out
    }
}

#[derive(Debug, Clone, Default)]
pub struct CsvTable {
    pub meta: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// `#`-prefixed summary lines after the data.
    pub summary: Vec<String>,
}

impl CsvTable {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Self::default()
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Numeric column by name.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match &r[j] {
                    Cell::Num(x) => *x,
                    Cell::Text(_) => f64::NAN,
                })
                .collect(),
        )
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for m in &self.meta {
            let _ = writeln!(s, "{m}");
        }
        let _ = writeln!(s, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(x) => format!("{x:.16e}"),
                    Cell::Text(t) => t.clone(),
                })
                .collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        for m in &self.summary {
            let _ = writeln!(s, "# {m}");
        }
        s
    }
}
