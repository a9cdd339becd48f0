//! Machine-readable result records and the CSV/JSON writers.
//!
//! Outputs are deterministic: identical `(command, config, seed)` produce
//! byte-identical files. Wall-clock duration is therefore reported on
//! stderr, never embedded in the artifact.

use std::io::Write;
use std::time::Duration;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format '{other}' (expected csv|json)")),
        }
    }
}

/// One cell of a result row.
#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum Field {
    Str(String),
    Int(i64),
    Num(f64),
    Empty,
}

impl From<&str> for Field {
    fn from(s: &str) -> Self {
        Field::Str(s.to_string())
    }
}

impl From<String> for Field {
    fn from(s: String) -> Self {
        Field::Str(s)
    }
}

impl From<f64> for Field {
    fn from(x: f64) -> Self {
        Field::Num(x)
    }
}

impl From<i64> for Field {
    fn from(x: i64) -> Self {
        Field::Int(x)
    }
}

/// The outcome of one command invocation.
pub struct ResultRecord {
    pub command: String,
    pub version: String,
    pub config: serde_json::Value,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Field>>,
    /// Reported on stderr only; excluded from serialized artifacts so
    /// repeated runs stay byte-identical.
    pub duration: Duration,
}

impl ResultRecord {
    pub fn new(command: &str, config: serde_json::Value, columns: &[&str]) -> Self {
        Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            duration: Duration::ZERO,
        }
    }

    pub fn push_row(&mut self, row: Vec<Field>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.render_csv(),
            OutputFormat::Json => self.render_json(),
        }
    }

    fn render_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# command: {}\n", self.command));
        out.push_str(&format!("# version: {}\n", self.version));
        out.push_str(&format!("# config: {}\n", self.config));
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(csv_cell).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn render_json(&self) -> String {
        #[derive(Serialize)]
        struct JsonRecord<'a> {
            command: &'a str,
            version: &'a str,
            config: &'a serde_json::Value,
            columns: &'a [String],
            rows: Vec<Vec<&'a Field>>,
        }
        let record = JsonRecord {
            command: &self.command,
            version: &self.version,
            config: &self.config,
            columns: &self.columns,
            rows: self.rows.iter().map(|r| r.iter().collect()).collect(),
        };
        let mut s = serde_json::to_string_pretty(&record).expect("record serializes");
        s.push('\n');
        s
    }

    pub fn write_to(&self, out: Option<&std::path::Path>, format: OutputFormat) -> std::io::Result<()> {
        let rendered = self.render(format);
        match out {
            Some(path) => std::fs::write(path, rendered)?,
            None => std::io::stdout().write_all(rendered.as_bytes())?,
        }
        eprintln!(
            "# {} finished in {:.1} ms",
            self.command,
            self.duration.as_secs_f64() * 1e3
        );
        Ok(())
    }
}

fn csv_cell(field: &Field) -> String {
    match field {
        Field::Str(s) => s.clone(),
        Field::Int(i) => i.to_string(),
        Field::Num(x) => format_sig12(*x),
        Field::Empty => String::new(),
    }
}

/// Locale-free numeric formatting with 12 significant digits.
pub fn format_sig12(x: f64) -> String {
    format!("{x:.11e}")
}
