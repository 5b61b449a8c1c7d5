//! Block-PSD conic programs in standard form.
//!
//! A problem couples PSD block variables `X_j` and free scalars `u` through
//! linear equality rows:
//!
//! ```text
//! (P)  minimize    sum_j <C_j, X_j> + f . u
//!      subject to  sum_j <A_ij, X_j> + (B u)_i = b_i     for every row i
//!                  X_j >= 0
//!
//! (D)  maximize    b . y
//!      subject to  S_j = C_j - sum_i y_i A_ij >= 0
//!                  B^T y = f
//! ```
//!
//! Complex Hermitian blocks are handled internally through the real
//! symmetric embedding X -> [[Re X, -Im X], [Im X, Re X]], scaled so that
//! inner products and objective values agree with the complex data.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Domain of a PSD block variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockDomain {
    RealSymmetric,
    ComplexHermitian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BlockId(pub(crate) usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ScalarId(pub(crate) usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RowId(pub(crate) usize);

/// Sparse real coefficient matrix in the embedded space of one block.
#[derive(Debug, Clone, Default)]
pub(crate) struct SpMat {
    pub rows: Vec<u32>,
    pub cols: Vec<u32>,
    pub vals: Vec<f64>,
}

impl SpMat {
    fn push(&mut self, r: usize, c: usize, v: f64) {
        if v != 0.0 {
            self.rows.push(r as u32);
            self.cols.push(c as u32);
            self.vals.push(v);
        }
    }

    /// <A, M> for a dense symmetric M (column-major slice access).
    pub fn inner(&self, m: &DMatrix<f64>) -> f64 {
        let n = m.nrows();
        let s = m.as_slice();
        let mut acc = 0.0;
        for k in 0..self.vals.len() {
            let (p, q) = (self.rows[k] as usize, self.cols[k] as usize);
            // <A, M> = sum A[p, q] M[p, q] for symmetric M
            acc += self.vals[k] * s[q * n + p];
        }
        acc
    }

    /// out += c * A as a dense matrix.
    pub fn add_scaled_to(&self, out: &mut DMatrix<f64>, c: f64) {
        let n = out.nrows();
        let s = out.as_mut_slice();
        for k in 0..self.vals.len() {
            let (p, q) = (self.rows[k] as usize, self.cols[k] as usize);
            s[q * n + p] += c * self.vals[k];
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct BlockSpec {
    pub domain: BlockDomain,
    pub dim: usize,
}

impl BlockSpec {
    /// Dimension of the block after the real embedding.
    pub fn embedded_dim(&self) -> usize {
        match self.domain {
            BlockDomain::RealSymmetric => self.dim,
            BlockDomain::ComplexHermitian => 2 * self.dim,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub(crate) struct Row {
    pub rhs: f64,
    pub block_coeffs: Vec<(usize, SpMat)>,
    pub scalar_coeffs: Vec<(usize, f64)>,
}

/// A block-PSD conic program; see the module docs for the exact form.
#[derive(Debug, Clone, Default)]
pub struct SdpProblem {
    pub(crate) blocks: Vec<BlockSpec>,
    pub(crate) costs: Vec<Option<DMatrix<Complex64>>>,
    pub(crate) scalar_costs: Vec<f64>,
    pub(crate) rows: Vec<Row>,
}

impl SdpProblem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_block(&mut self, domain: BlockDomain, dim: usize) -> BlockId {
        assert!(dim >= 1, "block dimension must be at least 1");
        self.blocks.push(BlockSpec { domain, dim });
        self.costs.push(None);
        BlockId(self.blocks.len() - 1)
    }

    pub fn add_hermitian_block(&mut self, dim: usize) -> BlockId {
        self.add_block(BlockDomain::ComplexHermitian, dim)
    }

    pub fn add_real_block(&mut self, dim: usize) -> BlockId {
        self.add_block(BlockDomain::RealSymmetric, dim)
    }

    pub fn add_scalar(&mut self) -> ScalarId {
        self.scalar_costs.push(0.0);
        ScalarId(self.scalar_costs.len() - 1)
    }

    pub fn add_row(&mut self, rhs: f64) -> RowId {
        self.rows.push(Row { rhs, ..Row::default() });
        RowId(self.rows.len() - 1)
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_scalars(&self) -> usize {
        self.scalar_costs.len()
    }

    pub fn block_dim(&self, b: BlockId) -> usize {
        self.blocks[b.0].dim
    }

    pub fn block_domain(&self, b: BlockId) -> BlockDomain {
        self.blocks[b.0].domain
    }

    fn check_coeff(&self, b: BlockId, m: &DMatrix<Complex64>) -> Result<()> {
        let spec = &self.blocks[b.0];
        if m.nrows() != spec.dim || m.ncols() != spec.dim {
            return Err(Error::DimensionMismatch(format!(
                "coefficient is {}x{}, block {} wants {}x{}",
                m.nrows(),
                m.ncols(),
                b.0,
                spec.dim,
                spec.dim
            )));
        }
        let mut scale = 0f64;
        let mut asym = 0f64;
        for i in 0..spec.dim {
            for j in 0..spec.dim {
                let a = m[(i, j)];
                let bb = m[(j, i)].conj();
                scale = scale.max(a.norm());
                asym = asym.max((a - bb).norm());
                if spec.domain == BlockDomain::RealSymmetric && a.im != 0.0 {
                    return Err(Error::InvalidProblem(format!(
                        "real block {} given a complex coefficient",
                        b.0
                    )));
                }
            }
        }
        if asym > 1e-12 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::NotHermitian { asym, tol: 1e-12 * scale });
        }
        Ok(())
    }

    /// Objective coefficient of a block (Hermitian; defaults to zero).
    pub fn set_block_cost(&mut self, b: BlockId, c: &DMatrix<Complex64>) -> Result<()> {
        self.check_coeff(b, c)?;
        self.costs[b.0] = Some(c.clone());
        Ok(())
    }

    pub fn set_scalar_cost(&mut self, s: ScalarId, f: f64) {
        self.scalar_costs[s.0] = f;
    }

    pub fn set_rhs(&mut self, r: RowId, rhs: f64) {
        self.rows[r.0].rhs = rhs;
    }

    /// Coefficient of block `b` in row `r`; replaces any previous value.
    pub fn set_row_block_coeff(
        &mut self,
        r: RowId,
        b: BlockId,
        a: &DMatrix<Complex64>,
    ) -> Result<()> {
        self.check_coeff(b, a)?;
        let sp = embed_sparse(self.blocks[b.0].domain, a);
        let row = &mut self.rows[r.0];
        if let Some(slot) = row.block_coeffs.iter_mut().find(|(idx, _)| *idx == b.0) {
            slot.1 = sp;
        } else {
            row.block_coeffs.push((b.0, sp));
        }
        Ok(())
    }

    pub fn set_row_scalar_coeff(&mut self, r: RowId, s: ScalarId, v: f64) {
        let row = &mut self.rows[r.0];
        if let Some(slot) = row.scalar_coeffs.iter_mut().find(|(idx, _)| *idx == s.0) {
            slot.1 = v;
        } else {
            row.scalar_coeffs.push((s.0, v));
        }
    }

    /// Embedded cost matrix of block `j` (dense, scaled like the rows).
    pub(crate) fn embedded_cost(&self, j: usize) -> DMatrix<f64> {
        let spec = &self.blocks[j];
        let ed = spec.embedded_dim();
        let mut out = DMatrix::zeros(ed, ed);
        if let Some(c) = &self.costs[j] {
            let sp = embed_sparse(spec.domain, c);
            sp.add_scaled_to(&mut out, 1.0);
        }
        out
    }
}

/// Real sparse embedding of a Hermitian coefficient. For complex blocks the
/// embedding carries a factor 1/2 so that `<embed(A), embed(X)> = Re Tr(A X)`.
pub(crate) fn embed_sparse(domain: BlockDomain, a: &DMatrix<Complex64>) -> SpMat {
    let n = a.nrows();
    let mut sp = SpMat::default();
    match domain {
        BlockDomain::RealSymmetric => {
            for i in 0..n {
                for j in 0..n {
                    sp.push(i, j, a[(i, j)].re);
                }
            }
        }
        BlockDomain::ComplexHermitian => {
            for i in 0..n {
                for j in 0..n {
                    let z = a[(i, j)];
                    if z.re != 0.0 {
                        sp.push(i, j, z.re * 0.5);
                        sp.push(i + n, j + n, z.re * 0.5);
                    }
                    if z.im != 0.0 {
                        sp.push(i, j + n, -z.im * 0.5);
                        sp.push(i + n, j, z.im * 0.5);
                    }
                }
            }
        }
    }
    sp
}

/// Recover a complex Hermitian matrix from an embedded real block.
pub(crate) fn extract_complex(x: &DMatrix<f64>) -> DMatrix<Complex64> {
    let n = x.nrows() / 2;
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let re = 0.5 * (x[(i, j)] + x[(i + n, j + n)]);
            let im = 0.5 * (x[(i + n, j)] - x[(i, j + n)]);
            out[(i, j)] = Complex64::new(re, im);
        }
    }
    // exact Hermitian symmetrization of the extraction
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = (out[(i, j)] + out[(j, i)].conj()) * 0.5;
            out[(i, j)] = avg;
            out[(j, i)] = avg.conj();
        }
        out[(i, i)] = Complex64::new(out[(i, i)].re, 0.0);
    }
    out
}
