//! Matrix file format: `{"n": n, "entries": [[[re, im], …], …]}`, row-major.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianMatrix, C64};

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    n: usize,
    entries: Vec<Vec<[f64; 2]>>,
}

pub fn matrix_to_json(m: &ComplexMatrix) -> String {
    let n = m.dim();
    let entries = (0..n).map(|r| (0..n).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect()).collect();
    serde_json::to_string(&MatrixJson { n, entries }).expect("matrix serialization")
}

pub fn matrix_from_json(s: &str) -> Result<ComplexMatrix> {
    let raw: MatrixJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    if raw.entries.len() != raw.n {
        return Err(Error::Dimension { expected: raw.n, found: raw.entries.len() });
    }
    let mut data = Vec::with_capacity(raw.n * raw.n);
    for row in &raw.entries {
        if row.len() != raw.n {
            return Err(Error::Dimension { expected: raw.n, found: row.len() });
        }
        data.extend(row.iter().map(|&[re, im]| C64::new(re, im)));
    }
    ComplexMatrix::from_row_major(raw.n, data)
}

/// Parses and checks the Hermitian defect against `tol` (relative).
pub fn hermitian_from_json(s: &str, tol: f64) -> Result<HermitianMatrix> {
    HermitianMatrix::with_tol(matrix_from_json(s)?, tol)
}
