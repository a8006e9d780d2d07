//! Problem-instance files.
//!
//! Instances are JSON with complex entries as `[re, im]` pairs:
//!
//! ```json
//! {
//!   "dim": 2,
//!   "gram":   [[[0,0],[1,0]], [[1,0],[0,0]]],
//!   "matrix": [[[0,0],[1,0]], [[0,0],[0,0]]],
//!   "label": "flip"
//! }
//! ```
//!
//! The inner product convention is `[x, y] = y^* G x`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{KreinError, Result};
use crate::linalg::{cx, CMatrix};
use crate::operator::{build_operator, KreinOperator};
use crate::space::build_space_with;
use crate::tol::Tolerances;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ProblemFile {
    pub dim: usize,
    pub gram: Vec<Vec<[f64; 2]>>,
    pub matrix: Vec<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub label: Option<String>,
}

fn to_matrix(dim: usize, rows: &[Vec<[f64; 2]>], field: &str) -> Result<CMatrix> {
    if rows.len() != dim {
        return Err(KreinError::InvalidInput(format!(
            "field '{field}' has {} rows, expected dim = {dim}",
            rows.len()
        )));
    }
    let mut m = CMatrix::zeros(dim, dim);
    for (r, row) in rows.iter().enumerate() {
        if row.len() != dim {
            return Err(KreinError::InvalidInput(format!(
                "field '{field}' row {r} has {} entries, expected {dim}",
                row.len()
            )));
        }
        for (c, &[re, im]) in row.iter().enumerate() {
            if !re.is_finite() || !im.is_finite() {
                return Err(KreinError::InvalidInput(format!(
                    "field '{field}' entry ({r},{c}) is not finite"
                )));
            }
            m[(r, c)] = cx(re, im);
        }
    }
    Ok(m)
}

fn from_matrix(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
        .collect()
}

impl ProblemFile {
    pub fn from_operator(op: &KreinOperator, label: Option<String>) -> ProblemFile {
        ProblemFile {
            dim: op.dim(),
            gram: from_matrix(op.space().gram()),
            matrix: from_matrix(op.matrix()),
            label,
        }
    }

    pub fn to_operator(&self, tol: Tolerances) -> Result<KreinOperator> {
        if self.dim == 0 {
            return Err(KreinError::InvalidInput("dim must be positive".into()));
        }
        let gram = to_matrix(self.dim, &self.gram, "gram")?;
        let mat = to_matrix(self.dim, &self.matrix, "matrix")?;
        let space = build_space_with(gram, tol)?;
        build_operator(space, mat)
    }

    pub fn parse(text: &str) -> Result<ProblemFile> {
        serde_json::from_str(text).map_err(|e| {
            KreinError::InvalidInput(format!(
                "problem file parse error at line {}, column {}: {e}",
                e.line(),
                e.column()
            ))
        })
    }

    pub fn read(path: &Path) -> Result<ProblemFile> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| KreinError::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
        ProblemFile::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem files always serialize")
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")
            .map_err(|e| KreinError::InvalidInput(format!("cannot write {}: {e}", path.display())))
    }
}
