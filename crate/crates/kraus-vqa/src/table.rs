//! CSV result tables with a `# key = value` metadata header.

use std::fmt;
use std::io::Write;

use crate::config::{ConfigError, ExperimentConfig};
use crate::error::HarnessError;

/// Prefix of metadata keys that echo the configuration.
const CONFIG_PREFIX: &str = "config.";

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
}

impl Cell {
    pub fn as_f64(self) -> f64 {
        match self {
            Cell::Int(v) => v as f64,
            Cell::Float(v) => v,
        }
    }

    fn parse(text: &str) -> Option<Self> {
        if let Ok(v) = text.parse::<u64>() {
            return Some(Cell::Int(v));
        }
        text.parse::<f64>().ok().map(Cell::Float)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(v) => write!(f, "{v}"),
            // Debug keeps a decimal point, so floats never read back as integers.
            Cell::Float(v) => write!(f, "{v:?}"),
        }
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Int(u64::from(v))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResultTable {
    pub metadata: Vec<(String, String)>,
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl ResultTable {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            metadata: Vec::new(),
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn push_row(&mut self, row: Vec<Cell>) -> Result<(), HarnessError> {
        if row.len() != self.columns.len() {
            return Err(HarnessError::Table(format!(
                "row has {} cells, table has {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn set_meta(&mut self, key: impl Into<String>, value: impl fmt::Display) {
        let key = key.into();
        let value = value.to_string();
        match self.metadata.iter_mut().find(|(k, _)| *k == key) {
            Some(entry) => entry.1 = value,
            None => self.metadata.push((key, value)),
        }
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Records the configuration so that [`ResultTable::config`] can rebuild
    /// it. The output path is left out so the table does not depend on where
    /// it is written.
    pub fn echo_config(&mut self, cfg: &ExperimentConfig) {
        for line in cfg.to_text().lines() {
            if let Some((k, v)) = line.split_once(" = ").filter(|(k, _)| *k != "output") {
                self.set_meta(format!("{CONFIG_PREFIX}{k}"), v);
            }
        }
    }

    pub fn config(&self) -> Result<ExperimentConfig, ConfigError> {
        let text: String = self
            .metadata
            .iter()
            .filter_map(|(k, v)| k.strip_prefix(CONFIG_PREFIX).map(|k| format!("{k} = {v}\n")))
            .collect();
        ExperimentConfig::parse(&text, None)
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[i].as_f64()).collect())
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<(), HarnessError> {
        for (k, v) in &self.metadata {
            writeln!(out, "# {k} = {v}").map_err(|e| HarnessError::Io {
                path: "<output>".into(),
                source: e,
            })?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_string))?;
        }
        w.flush().map_err(|e| HarnessError::Io {
            path: "<output>".into(),
            source: e,
        })?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("table text is UTF-8")
    }

    pub fn parse_csv(text: &str) -> Result<Self, HarnessError> {
        let mut metadata = Vec::new();
        for line in text.lines() {
            let Some(body) = line.strip_prefix('#') else { break };
            let (k, v) = body
                .trim()
                .split_once(" = ")
                .ok_or_else(|| HarnessError::Table(format!("malformed metadata line {line:?}")))?;
            metadata.push((k.to_string(), v.to_string()));
        }
        let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let columns: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
        let mut table = ResultTable {
            metadata,
            columns,
            rows: Vec::new(),
        };
        for record in reader.records() {
            let record = record?;
            let row = record
                .iter()
                .map(|f| Cell::parse(f).ok_or_else(|| HarnessError::Table(format!("bad cell {f:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            table.push_row(row)?;
        }
        Ok(table)
    }
}
