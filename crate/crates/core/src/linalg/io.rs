//! Matrix file formats: JSON (exact or float) and headerless CSV (float).

use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::matrix::{Matrix, OrderedPoints};
use super::scalar::{parse_rational, Scalar};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct MatrixFile {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<Value>>,
    exact: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    row_points: Option<OrderedPoints>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    col_points: Option<OrderedPoints>,
}

fn entry(v: &Value, exact: bool) -> Result<Scalar> {
    let bad = || Error::Parse(format!("bad matrix entry {v}"));
    match (v, exact) {
        // Decimal text parses exactly, so 0.1 means 1/10 in an exact file.
        (Value::Number(n), true) => parse_rational(&n.to_string()).map(Scalar::Exact),
        (Value::String(s), true) => parse_rational(s).map(Scalar::Exact),
        (Value::Number(n), false) => n.as_f64().map(Scalar::Float).ok_or_else(bad),
        (Value::String(s), false) => {
            let x: f64 = s.trim().parse().map_err(|_| bad())?;
            if !x.is_finite() {
                return Err(Error::NonFinite(x));
            }
            Ok(Scalar::Float(x))
        }
        _ => Err(bad()),
    }
}

impl TryFrom<MatrixFile> for Matrix {
    type Error = Error;

    fn try_from(f: MatrixFile) -> Result<Matrix> {
        if f.entries.len() != f.rows || f.entries.iter().any(|r| r.len() != f.cols) {
            return Err(Error::Parse(format!(
                "entries do not match declared shape {}x{}",
                f.rows, f.cols
            )));
        }
        let data = f
            .entries
            .iter()
            .flatten()
            .map(|v| entry(v, f.exact))
            .collect::<Result<Vec<_>>>()?;
        Matrix::from_scalars(f.rows, f.cols, data)?.with_points(f.row_points, f.col_points)
    }
}

impl From<&Matrix> for MatrixFile {
    fn from(m: &Matrix) -> MatrixFile {
        let entries = (0..m.rows())
            .map(|i| {
                m.row_scalars(i)
                    .iter()
                    .map(|s| serde_json::to_value(s).expect("scalars serialize"))
                    .collect()
            })
            .collect();
        MatrixFile {
            rows: m.rows(),
            cols: m.cols(),
            entries,
            exact: m.is_exact(),
            row_points: m.row_points().cloned(),
            col_points: m.col_points().cloned(),
        }
    }
}

impl Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixFile::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = MatrixFile::deserialize(d)?;
        Matrix::try_from(f).map_err(serde::de::Error::custom)
    }
}

pub fn matrix_from_json(text: &str) -> Result<Matrix> {
    Ok(serde_json::from_str(text)?)
}

pub fn matrix_to_json(m: &Matrix) -> String {
    serde_json::to_string_pretty(m).expect("matrix serializes")
}

/// Headerless CSV of floats, one matrix row per line.
pub fn matrix_from_csv<R: Read>(reader: R) -> Result<Matrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|f| {
                let x: f64 = f.parse().map_err(|_| Error::Parse(format!("bad CSV field {f:?}")))?;
                if x.is_finite() {
                    Ok(x)
                } else {
                    Err(Error::NonFinite(x))
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Empty);
    }
    Matrix::from_float_rows(&rows)
}

pub fn matrix_to_csv(m: &Matrix) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for i in 0..m.rows() {
        w.write_record((0..m.cols()).map(|j| m.get_f64(i, j).to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Reads a matrix file; `.csv` files are parsed as CSV, everything else as JSON.
pub fn read_matrix(path: &Path) -> Result<Matrix> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        matrix_from_csv(text.as_bytes())
    } else {
        matrix_from_json(&text)
    }
}
