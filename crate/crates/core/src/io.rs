//! JSON file formats shared by the library and the command line.

use std::path::Path;

use nalgebra::DMatrix;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tensor::{CubicalTensor, TensorError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid content: {0}")]
    Invalid(String),
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        IoError::Parse { line: e.line(), column: e.column(), message: e.to_string() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NonZero {
    /// 1-based multi-index.
    pub idx: Vec<usize>,
    pub val: f64,
}

/// Wire form of a tensor; either `entries` or `nonzeros` must be present.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TensorLiteral {
    pub order: usize,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nonzeros: Option<Vec<NonZero>>,
}

impl TryFrom<TensorLiteral> for CubicalTensor {
    type Error = TensorError;

    fn try_from(lit: TensorLiteral) -> Result<Self, Self::Error> {
        match (lit.entries, lit.nonzeros) {
            (Some(entries), None) => CubicalTensor::new(lit.order, lit.dim, entries),
            (None, Some(nz)) => {
                let t = CubicalTensor::zeros(lit.order, lit.dim)?;
                let mut dense = t.entries().to_vec();
                for e in nz {
                    if e.idx.len() != lit.order {
                        return Err(TensorError::DimensionMismatch { expected: lit.order, got: e.idx.len() });
                    }
                    if let Some(&bad) = e.idx.iter().find(|&&i| i == 0 || i > lit.dim) {
                        return Err(TensorError::IndexOutOfRange { index: bad, dim: lit.dim });
                    }
                    let zero_based: Vec<usize> = e.idx.iter().map(|i| i - 1).collect();
                    dense[t.offset(&zero_based)] += e.val;
                }
                CubicalTensor::new(lit.order, lit.dim, dense)
            }
            _ => Err(TensorError::AmbiguousLiteral),
        }
    }
}

/// Serde adapter storing a `DMatrix` as a list of rows.
pub mod matrix_rows {
    use nalgebra::DMatrix;
    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &DMatrix<f64>, s: S) -> Result<S::Ok, S::Error> {
        super::matrix_to_rows(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DMatrix<f64>, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        super::rows_to_matrix(&rows).map_err(D::Error::custom)
    }
}

pub fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

pub fn rows_to_matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>, String> {
    let n = rows.len();
    let cols = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != cols) {
        return Err("matrix rows have different lengths".into());
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err("matrix has a non-finite entry".into());
    }
    Ok(DMatrix::from_fn(n, cols, |i, j| rows[i][j]))
}

pub fn from_json_str<T: DeserializeOwned>(text: &str) -> Result<T, IoError> {
    Ok(serde_json::from_str(text)?)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| IoError::Read { path: path.display().to_string(), source })?;
    from_json_str(&text)
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}
