//! JSON tuple files.
//!
//! ```text
//! {"n": int, "matrices": [[[f64; n]; n]; n], "metadata": {...}}
//! ```
//!
//! Floats are written with 17 significant digits so a save/load round trip
//! is bit-exact, and the writer is deterministic so identical tuples produce
//! byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::tuples::MatrixTuple;

/// Loaded matrices further than this from symmetric trigger a warning.
pub const SYMMETRY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_target: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TupleFile {
    pub n: usize,
    pub matrices: Vec<Vec<Vec<f64>>>,
    #[serde(default)]
    pub metadata: Metadata,
}

/// A parsed tuple together with the largest asymmetry that was averaged away.
#[derive(Debug, Clone)]
pub struct LoadedTuple {
    pub tuple: MatrixTuple,
    pub metadata: Metadata,
    pub max_asymmetry: f64,
}

impl LoadedTuple {
    pub fn symmetry_warning(&self) -> Option<String> {
        (self.max_asymmetry > SYMMETRY_TOL).then(|| {
            format!(
                "input matrices asymmetric by up to {:e}; symmetrized by averaging",
                self.max_asymmetry
            )
        })
    }
}

impl TupleFile {
    pub fn from_tuple(t: &MatrixTuple, metadata: Metadata) -> Self {
        Self {
            n: t.n(),
            matrices: t.iter().map(SymMatrix::to_rows).collect(),
            metadata,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: TupleFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        file.validate()?;
        Ok(file)
    }

    fn validate(&self) -> Result<()> {
        let n = self.n;
        if n == 0 {
            return Err(Error::Parse("n must be >= 1".into()));
        }
        if self.matrices.len() != n {
            return Err(Error::Parse(format!("expected {n} matrices, found {}", self.matrices.len())));
        }
        for (k, m) in self.matrices.iter().enumerate() {
            if m.len() != n || m.iter().any(|row| row.len() != n) {
                return Err(Error::Parse(format!("matrix {k} is not {n}x{n}")));
            }
        }
        Ok(())
    }

    pub fn to_tuple(&self) -> Result<LoadedTuple> {
        self.validate()?;
        let n = self.n;
        let mut max_asymmetry: f64 = 0.0;
        let mut matrices = Vec::with_capacity(n);
        for rows in &self.matrices {
            for i in 0..n {
                for j in (i + 1)..n {
                    max_asymmetry = max_asymmetry.max((rows[i][j] - rows[j][i]).abs());
                }
            }
            matrices.push(SymMatrix::from_rows(rows)?);
        }
        Ok(LoadedTuple {
            tuple: MatrixTuple::new(matrices)?,
            metadata: self.metadata.clone(),
            max_asymmetry,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let mut out = String::new();
        writeln!(out, "{{").unwrap();
        writeln!(out, "  \"n\": {},", self.n).unwrap();
        writeln!(out, "  \"matrices\": [").unwrap();
        for (k, m) in self.matrices.iter().enumerate() {
            writeln!(out, "    [").unwrap();
            for (i, row) in m.iter().enumerate() {
                let cells = row.iter().map(|&v| format_float(v)).collect::<Result<Vec<_>>>()?;
                let sep = if i + 1 < m.len() { "," } else { "" };
                writeln!(out, "      [{}]{sep}", cells.join(", ")).unwrap();
            }
            let sep = if k + 1 < self.matrices.len() { "," } else { "" };
            writeln!(out, "    ]{sep}").unwrap();
        }
        writeln!(out, "  ],").unwrap();
        let meta = serde_json::to_string(&self.metadata).map_err(|e| Error::Parse(e.to_string()))?;
        writeln!(out, "  \"metadata\": {meta}").unwrap();
        writeln!(out, "}}").unwrap();
        Ok(out)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

/// 17 significant digits in scientific notation.
fn format_float(v: f64) -> Result<String> {
    if !v.is_finite() {
        return Err(Error::InvalidArgument(format!("cannot serialize non-finite value {v}")));
    }
    Ok(format!("{v:.16e}"))
}

pub fn load_tuple(path: impl AsRef<Path>) -> Result<LoadedTuple> {
    TupleFile::read(path)?.to_tuple()
}

pub fn save_tuple(path: impl AsRef<Path>, t: &MatrixTuple, metadata: Metadata) -> Result<()> {
    TupleFile::from_tuple(t, metadata).write(path)
}
