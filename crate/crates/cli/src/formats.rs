//! JSON file formats. Complex numbers are `[re, im]` arrays; inner products
//! follow `<u, v> = v^H u`.

use std::fs;
use std::path::Path;

use biframe_core::{ComplexMatrix, VectorPairSystem, C64};
use serde::{de::DeserializeOwned, Deserialize, Serialize};

/// Row-major matrix: `data[i][j]` is entry `(i, j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<C64>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        MatrixFile {
            rows: m.rows(),
            cols: m.cols(),
            data: (0..m.rows())
                .map(|i| (0..m.cols()).map(|j| m[(i, j)]).collect())
                .collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix, String> {
        if self.data.len() != self.rows || self.data.iter().any(|r| r.len() != self.cols) {
            return Err(format!(
                "matrix data does not match declared shape {}x{}",
                self.rows, self.cols
            ));
        }
        if self.rows == 0 || self.cols == 0 {
            return Err("matrix must have at least one row and column".into());
        }
        check_finite(self.data.iter().flatten())?;
        ComplexMatrix::from_rows(&self.data).map_err(|e| e.to_string())
    }
}

/// The two families of a pair; `x[j]` and `y[j]` are vectors of length `dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairFile {
    pub dim: usize,
    pub count: usize,
    pub x: Vec<Vec<C64>>,
    pub y: Vec<Vec<C64>>,
}

impl PairFile {
    pub fn from_pair(p: &VectorPairSystem) -> Self {
        PairFile {
            dim: p.dim(),
            count: p.count(),
            x: p.x_vectors().to_vec(),
            y: p.y_vectors().to_vec(),
        }
    }

    pub fn to_pair(&self) -> Result<VectorPairSystem, String> {
        if self.x.len() != self.count || self.y.len() != self.count {
            return Err(format!(
                "pair declares count {} but has {} and {} vectors",
                self.count,
                self.x.len(),
                self.y.len()
            ));
        }
        check_finite(self.x.iter().chain(&self.y).flatten())?;
        VectorPairSystem::new(self.dim, self.x.clone(), self.y.clone()).map_err(|e| e.to_string())
    }
}

fn check_finite<'a>(mut it: impl Iterator<Item = &'a C64>) -> Result<(), String> {
    if it.any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err("non-finite entry".into());
    }
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), String> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    text.push('\n');
    fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix, String> {
    read_json::<MatrixFile>(path)?.to_matrix()
}

pub fn read_pair(path: &Path) -> Result<VectorPairSystem, String> {
    read_json::<PairFile>(path)?.to_pair()
}
