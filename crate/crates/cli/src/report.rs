//! Run reports, input loading and structured errors.

use std::path::{Path, PathBuf};

use finmet::io::{matrix_from_value, read_family};
use finmet::gluing::SubsetFamily;
use finmet::{Error, FinMetric, LabeledMatrix, Metric, Rational};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub enum CliError {
    Usage(String),
    Io(String),
    Domain(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) | CliError::Domain(_) => 1,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            CliError::Usage(msg) => json!({ "error": "Usage", "message": msg }),
            CliError::Io(msg) => json!({ "error": "Io", "message": msg }),
            CliError::Domain(e) => {
                let mut v = json!({ "error": e.code(), "message": e.to_string() });
                if let Error::Invalid(violations) = e {
                    v["violations"] = serde_json::to_value(violations).expect("violations serialize");
                }
                v
            }
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Collects the files a command reads, with their digests.
#[derive(Default)]
pub struct Inputs {
    seen: Vec<(PathBuf, String)>,
}

impl Inputs {
    fn read(&mut self, path: &Path) -> CliResult<String> {
        let bytes = std::fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let digest = Sha256::digest(&bytes);
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.seen.push((path.to_path_buf(), hex));
        String::from_utf8(bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }

    /// A metric document, or a run report whose result carries one.
    fn document(&mut self, path: &Path) -> CliResult<Value> {
        let text = self.read(path)?;
        let doc: Value = serde_json::from_str(&text).map_err(|e| Error::Document(format!("{}: {e}", path.display())))?;
        Ok(match doc.pointer("/result/metric") {
            Some(m) if doc.get("points").is_none() => m.clone(),
            _ => doc,
        })
    }

    pub fn matrix(&mut self, path: &Path) -> CliResult<LabeledMatrix<Rational>> {
        Ok(matrix_from_value(&self.document(path)?)?)
    }

    pub fn metric(&mut self, path: &Path) -> CliResult<Metric> {
        Ok(FinMetric::new(self.matrix(path)?)?)
    }

    pub fn family(&mut self, path: &Path) -> CliResult<SubsetFamily> {
        let text = self.read(path)?;
        Ok(read_family(&text)?)
    }

    pub fn to_json(&self) -> Value {
        self.seen.iter().map(|(p, h)| json!({ "path": p.display().to_string(), "sha256": h })).collect()
    }
}

pub struct RunReport {
    pub command: Vec<String>,
    pub inputs: Value,
    pub result: Value,
    pub exact: bool,
    pub timing_ms: Option<f64>,
}

impl RunReport {
    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "command": self.command,
            "inputs": self.inputs,
            "result": self.result,
            "exact": self.exact,
        });
        if let Some(ms) = self.timing_ms {
            v["timing_ms"] = json!(ms);
        }
        v
    }

    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
        s.push('\n');
        s
    }
}
