//! Table output in CSV or JSON, each file prefixed with the invocation
//! that produced it.

use std::fs;
use std::io::Write;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Value {
    Int(i64),
    Float(f64),
    Str(String),
    Bool(bool),
    Empty,
}

impl Value {
    fn csv(&self) -> String {
        match self {
            Value::Int(v) => v.to_string(),
            // 17 significant digits: round-trips every f64 exactly
            Value::Float(v) => format!("{v:.16e}"),
            Value::Str(s) => s.clone(),
            Value::Bool(b) => b.to_string(),
            Value::Empty => String::new(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Value::Int(v) => serde_json::json!(v),
            Value::Float(v) => serde_json::json!(v),
            Value::Str(s) => serde_json::json!(s),
            Value::Bool(b) => serde_json::json!(b),
            Value::Empty => serde_json::Value::Null,
        }
    }
}

pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
    /// extra `# ...` comment lines after the invocation (CSV only)
    pub notes: Vec<String>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Write alongside the invocation line; the extension follows the
    /// format.
    pub fn write(
        &self,
        dir: &Path,
        stem: &str,
        format: OutputFormat,
        invocation: &str,
    ) -> std::io::Result<std::path::PathBuf> {
        fs::create_dir_all(dir)?;
        let path = dir.join(format!(
            "{stem}.{}",
            match format {
                OutputFormat::Csv => "csv",
                OutputFormat::Json => "json",
            }
        ));
        let mut file = fs::File::create(&path)?;
        match format {
            OutputFormat::Csv => {
                writeln!(file, "# {invocation}")?;
                for note in &self.notes {
                    writeln!(file, "# {note}")?;
                }
                writeln!(file, "{}", self.columns.join(","))?;
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(Value::csv).collect();
                    writeln!(file, "{}", cells.join(","))?;
                }
            }
            OutputFormat::Json => {
                let rows: Vec<serde_json::Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let obj: serde_json::Map<String, serde_json::Value> = self
                            .columns
                            .iter()
                            .zip(row)
                            .map(|(c, v)| (c.to_string(), v.json()))
                            .collect();
                        serde_json::Value::Object(obj)
                    })
                    .collect();
                let doc = serde_json::json!({
                    "invocation": invocation,
                    "notes": self.notes,
                    "rows": rows,
                });
                writeln!(file, "{}", serde_json::to_string_pretty(&doc)?)?;
            }
        }
        Ok(path)
    }
}
