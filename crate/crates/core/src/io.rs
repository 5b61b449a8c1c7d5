//! Shared JSON file formats for operators and vectors.
//!
//! Matrix files: `{"dims": [d1, ..., dk], "re": [[...]], "im": [[...]]}`,
//! row-major, with an optional `"cut"` annotation for witness files. The
//! reader validates the shape and Hermiticity.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};
use crate::herm::HermitianOperator;
use crate::shape::{Bipartition, SubsystemShape};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dims: Vec<usize>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cut: Option<String>,
}

impl MatrixFile {
    pub fn from_operator(op: &HermitianOperator) -> Self {
        let n = op.dim();
        let mut re = vec![vec![0.0; n]; n];
        let mut im = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                let z = op.matrix()[(i, j)];
                re[i][j] = z.re;
                im[i][j] = z.im;
            }
        }
        Self { dims: op.shape().dims().to_vec(), re, im, cut: None }
    }

    pub fn with_cut(mut self, cut: &Bipartition) -> Self {
        self.cut = Some(cut.label());
        self
    }

    pub fn to_operator(&self) -> Result<HermitianOperator> {
        let shape = SubsystemShape::new(self.dims.clone())?;
        let n = shape.total();
        if self.re.len() != n || self.im.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "matrix has {} rows, dims want {n}",
                self.re.len()
            )));
        }
        let mut mat = DMatrix::<Complex64>::zeros(n, n);
        for i in 0..n {
            if self.re[i].len() != n || self.im[i].len() != n {
                return Err(Error::DimensionMismatch(format!("row {i} has wrong length")));
            }
            for j in 0..n {
                mat[(i, j)] = Complex64::new(self.re[i][j], self.im[i][j]);
            }
        }
        HermitianOperator::new(shape, mat)
    }

    pub fn parsed_cut(&self) -> Result<Option<Bipartition>> {
        match &self.cut {
            None => Ok(None),
            Some(label) => {
                let shape = SubsystemShape::new(self.dims.clone())?;
                Ok(Some(Bipartition::parse(&shape, label)?))
            }
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        serde_json::to_writer(std::io::BufWriter::new(file), self)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Ok(serde_json::from_reader(std::io::BufReader::new(file))?)
    }
}

/// Vector files use flat `re` / `im` arrays.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VectorFile {
    pub dims: Vec<usize>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl VectorFile {
    pub fn from_vector(shape: &SubsystemShape, v: &[Complex64]) -> Self {
        Self {
            dims: shape.dims().to_vec(),
            re: v.iter().map(|z| z.re).collect(),
            im: v.iter().map(|z| z.im).collect(),
        }
    }

    pub fn to_vector(&self) -> Result<(SubsystemShape, Vec<Complex64>)> {
        let shape = SubsystemShape::new(self.dims.clone())?;
        let n = shape.total();
        if self.re.len() != n || self.im.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "vector has {} entries, dims want {n}",
                self.re.len()
            )));
        }
        let v = self
            .re
            .iter()
            .zip(&self.im)
            .map(|(&r, &i)| Complex64::new(r, i))
            .collect();
        Ok((shape, v))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        serde_json::to_writer(std::io::BufWriter::new(file), self)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Ok(serde_json::from_reader(std::io::BufReader::new(file))?)
    }
}
