//! JSON documents: metrics as `{"points": [...], "matrix": [[...]]}` and
//! subset families as `{"parts": [[...]]}`.
//!
//! Matrix entries may be strings (`"3/8"`, `"0.25"`) or JSON numbers; the
//! emitter always writes strings in canonical form.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::gluing::SubsetFamily;
use crate::metric::{FinMetric, LabeledMatrix};
use crate::scalar::Scalar;

fn doc_err(msg: impl Into<String>) -> Error {
    Error::Document(msg.into())
}

fn parse_value(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| doc_err(e.to_string()))
}

pub fn scalar_from_json<T: Scalar>(v: &Value) -> Result<T> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        other => return Err(doc_err(format!("expected a number or string, found {other}"))),
    };
    T::parse_text(&text).ok_or(Error::ParseScalar(text))
}

pub fn scalar_json<T: Scalar>(v: &T) -> Value {
    Value::String(v.to_text())
}

fn string_list(v: &Value, what: &str) -> Result<Vec<String>> {
    v.as_array()
        .ok_or_else(|| doc_err(format!("{what} must be an array")))?
        .iter()
        .map(|s| s.as_str().map(str::to_string).ok_or_else(|| doc_err(format!("{what} must hold strings"))))
        .collect()
}

/// Reads the document shape without checking the metric axioms.
pub fn matrix_from_value<T: Scalar>(doc: &Value) -> Result<LabeledMatrix<T>> {
    let labels = string_list(doc.get("points").ok_or_else(|| doc_err("missing \"points\""))?, "points")?;
    let rows = doc
        .get("matrix")
        .and_then(Value::as_array)
        .ok_or_else(|| doc_err("missing \"matrix\" array"))?
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| doc_err("matrix rows must be arrays"))?
                .iter()
                .map(scalar_from_json)
                .collect::<Result<Vec<T>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    LabeledMatrix::from_rows(labels, rows)
}

pub fn read_matrix<T: Scalar>(text: &str) -> Result<LabeledMatrix<T>> {
    matrix_from_value(&parse_value(text)?)
}

pub fn read_metric<T: Scalar>(text: &str) -> Result<FinMetric<T>> {
    FinMetric::new(read_matrix(text)?)
}

pub fn matrix_json<T: Scalar>(m: &LabeledMatrix<T>) -> Value {
    let rows: Vec<Vec<Value>> = m.rows().iter().map(|r| r.iter().map(scalar_json).collect()).collect();
    json!({ "points": m.labels(), "matrix": rows })
}

pub fn metric_json<T: Scalar>(d: &FinMetric<T>) -> Value {
    matrix_json(d.as_matrix())
}

pub fn read_family(text: &str) -> Result<SubsetFamily> {
    let doc = parse_value(text)?;
    let parts = doc
        .get("parts")
        .and_then(Value::as_array)
        .ok_or_else(|| doc_err("missing \"parts\" array"))?
        .iter()
        .map(|p| string_list(p, "parts"))
        .collect::<Result<Vec<_>>>()?;
    SubsetFamily::new(parts)
}

pub fn family_json(f: &SubsetFamily) -> Value {
    json!({ "parts": f.parts() })
}
