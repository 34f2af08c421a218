// Copyright 2026 The qsvd Developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Matrix and state files.
//!
//! JSON matrices are `{"rows": M, "cols": N, "data": [[re, im], ...]}` in
//! row-major order; extra fields (such as an embedded `config`) are ignored
//! on read. CSV matrices hold one row per line as `re,im,re,im,...`; lines
//! starting with `#` are comments. Floats are written in shortest
//! round-trip form, so files re-read bit-exactly.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64};
use crate::state::{DensityMatrix, QuantumState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<Value>,
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix, config: Option<Value>) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            data: m.as_slice().iter().map(|z| [z.re, z.im]).collect(),
            config,
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        ComplexMatrix::new(
            self.rows,
            self.cols,
            self.data.iter().map(|p| C64::new(p[0], p[1])).collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dim: usize,
    pub amplitudes: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<Value>,
}

pub fn matrix_to_json(m: &ComplexMatrix, config: Option<Value>) -> Result<String> {
    Ok(serde_json::to_string(&MatrixFile::from_matrix(m, config))?)
}

pub fn matrix_from_json(text: &str) -> Result<ComplexMatrix> {
    serde_json::from_str::<MatrixFile>(text)?.to_matrix()
}

pub fn matrix_to_csv(m: &ComplexMatrix) -> String {
    let mut out = String::new();
    for j in 0..m.rows() {
        let cells: Vec<String> = m.row(j).iter().map(|z| format!("{},{}", z.re, z.im)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn matrix_from_csv(text: &str) -> Result<ComplexMatrix> {
    let mut rows = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let values = line
            .split(',')
            .map(|c| {
                c.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Format(format!("line {}: {e}", line_no + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        if values.len() % 2 != 0 {
            return Err(Error::Format(format!("line {}: odd number of values", line_no + 1)));
        }
        rows.push(values.chunks(2).map(|p| C64::new(p[0], p[1])).collect::<Vec<_>>());
    }
    if rows.is_empty() {
        return Err(Error::Format("no matrix rows".into()));
    }
    ComplexMatrix::from_rows(&rows)
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

/// Reads JSON, or CSV when the extension is `.csv`.
pub fn read_matrix(path: &Path) -> Result<ComplexMatrix> {
    let text = read_text(path)?;
    if is_csv(path) {
        matrix_from_csv(&text)
    } else {
        matrix_from_json(&text)
    }
}

/// Writes JSON (with `config` embedded), or CSV when the extension is `.csv`
/// (config as a leading comment line).
pub fn write_matrix(path: &Path, m: &ComplexMatrix, config: Option<Value>) -> Result<()> {
    let text = if is_csv(path) {
        let mut s = String::new();
        if let Some(c) = config {
            s.push_str(&format!("# config: {}\n", serde_json::to_string(&c)?));
        }
        s.push_str(&matrix_to_csv(m));
        s
    } else {
        let mut s = matrix_to_json(m, config)?;
        s.push('\n');
        s
    };
    fs::write(path, text)?;
    Ok(())
}

pub fn state_to_json(psi: &QuantumState, config: Option<Value>) -> Result<String> {
    let file = StateFile {
        dim: psi.dim(),
        amplitudes: psi.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
        config,
    };
    Ok(serde_json::to_string(&file)?)
}

fn state_from_file(file: StateFile) -> Result<QuantumState> {
    if file.amplitudes.len() != file.dim {
        return Err(Error::DimensionMismatch {
            expected: file.dim,
            found: file.amplitudes.len(),
        });
    }
    QuantumState::new(file.amplitudes.iter().map(|p| C64::new(p[0], p[1])).collect())
}

pub fn read_state(path: &Path) -> Result<QuantumState> {
    state_from_file(serde_json::from_str(&read_text(path)?)?)
}

pub fn write_state(path: &Path, psi: &QuantumState, config: Option<Value>) -> Result<()> {
    let mut s = state_to_json(psi, config)?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

/// A state file (taken as `|ψ⟩⟨ψ|`) or a matrix file holding a density
/// matrix.
pub fn read_density(path: &Path) -> Result<DensityMatrix> {
    let text = read_text(path)?;
    let value: Value = serde_json::from_str(&text)?;
    if value.get("amplitudes").is_some() {
        return Ok(state_from_file(serde_json::from_value(value)?)?.to_density());
    }
    DensityMatrix::new(serde_json::from_value::<MatrixFile>(value)?.to_matrix()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn awkward() -> ComplexMatrix {
        ComplexMatrix::new(
            2,
            2,
            vec![
                C64::new(0.1 + 0.2, -1e-300),
                C64::new(std::f64::consts::PI, 1.0 / 3.0),
                C64::new(-0.0, 5e-324),
                C64::new(123_456_789.123_456_79, -2.5e17),
            ],
        )
        .unwrap()
    }

    #[test]
    fn json_round_trip_is_exact() {
        let m = awkward();
        let back = matrix_from_json(&matrix_to_json(&m, Some(serde_json::json!({"seed": 1}))).unwrap()).unwrap();
        for (a, b) in m.as_slice().iter().zip(back.as_slice()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let m = awkward();
        let back = matrix_from_csv(&matrix_to_csv(&m)).unwrap();
        for (a, b) in m.as_slice().iter().zip(back.as_slice()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn malformed_inputs() {
        assert!(matrix_from_csv("1,2,3\n").is_err());
        assert!(matrix_from_csv("# only a comment\n").is_err());
        assert!(matrix_from_json(r#"{"rows":2,"cols":2,"data":[[1,0]]}"#).is_err());
        assert!(matrix_from_json(r#"{"rows":1,"cols":1,"data":[[1,0]],"extra":true}"#).is_ok());
    }
}
