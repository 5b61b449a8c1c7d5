//! Dense complex Hermitian operators on multipartite spaces.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::shape::SubsystemShape;

/// Relative tolerance for accepting a matrix as Hermitian.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Dense complex Hermitian matrix with multipartite shape metadata.
/// The universal carrier for states, witnesses and random samples.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    shape: SubsystemShape,
    mat: DMatrix<Complex64>,
}

impl HermitianOperator {
    /// Validates the shape and Hermiticity (relative tolerance 1e-12;
    /// inputs outside tolerance are rejected, not symmetrized).
    pub fn new(shape: SubsystemShape, mat: DMatrix<Complex64>) -> Result<Self> {
        let n = shape.total();
        if mat.nrows() != n || mat.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{}, shape wants {n}x{n}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let mut scale = 0f64;
        let mut asym = 0f64;
        for i in 0..n {
            for j in i..n {
                let a = mat[(i, j)];
                let b = mat[(j, i)].conj();
                scale = scale.max(a.norm()).max(b.norm());
                asym = asym.max((a - b).norm());
            }
        }
        let tol = HERMITICITY_TOL * scale.max(f64::MIN_POSITIVE);
        if asym > tol {
            return Err(Error::NotHermitian { asym, tol });
        }
        Ok(Self { shape, mat })
    }

    /// For internal constructions that are Hermitian by algebra.
    pub(crate) fn new_unchecked(shape: SubsystemShape, mat: DMatrix<Complex64>) -> Self {
        debug_assert_eq!(mat.nrows(), shape.total());
        Self { shape, mat }
    }

    pub fn zeros(shape: SubsystemShape) -> Self {
        let n = shape.total();
        Self::new_unchecked(shape, DMatrix::zeros(n, n))
    }

    pub fn identity(shape: SubsystemShape) -> Self {
        let n = shape.total();
        Self::new_unchecked(shape, DMatrix::identity(n, n))
    }

    /// Rank-one projector |psi><psi| (psi need not be normalized).
    pub fn projector(shape: SubsystemShape, psi: &[Complex64]) -> Result<Self> {
        let n = shape.total();
        if psi.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "vector length {} vs shape total {n}",
                psi.len()
            )));
        }
        let mut mat = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                mat[(i, j)] = psi[i] * psi[j].conj();
            }
        }
        Ok(Self::new_unchecked(shape, mat))
    }

    pub fn shape(&self) -> &SubsystemShape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.shape.total()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.mat
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.mat[(i, i)].re).sum()
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::new_unchecked(self.shape.clone(), self.mat.map(|z| z * c))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self::new_unchecked(self.shape.clone(), &self.mat + &other.mat))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self::new_unchecked(self.shape.clone(), &self.mat - &other.mat))
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::DimensionMismatch(format!(
                "shapes {:?} vs {:?}",
                self.shape.dims(),
                other.shape.dims()
            )));
        }
        Ok(())
    }

    /// Eigenvalues in ascending order with matching orthonormal eigenvectors
    /// as columns.
    pub fn eig(&self) -> (Vec<f64>, DMatrix<Complex64>) {
        eig_hermitian_matrix(&self.mat)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eig().0[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eig().0.last().unwrap()
    }

    /// Projection onto the positive semidefinite cone (negative eigenvalues
    /// clamped to zero).
    pub fn positive_part(&self) -> Self {
        let (vals, vecs) = self.eig();
        let n = self.dim();
        let mut out = DMatrix::<Complex64>::zeros(n, n);
        for (k, &v) in vals.iter().enumerate() {
            if v <= 0.0 {
                continue;
            }
            let col = vecs.column(k);
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] += col[i] * col[j].conj() * v;
                }
            }
        }
        // the spectral sum is Hermitian up to roundoff; make it exact
        let sym = symmetrize(&out);
        Self::new_unchecked(self.shape.clone(), sym)
    }

    pub fn norms(&self) -> Norms {
        let (vals, _) = self.eig();
        Norms {
            trace_norm: vals.iter().map(|v| v.abs()).sum(),
            hs_norm: vals.iter().map(|v| v * v).sum::<f64>().sqrt(),
            op_norm: vals.iter().map(|v| v.abs()).fold(0.0, f64::max),
        }
    }

    /// Hilbert-Schmidt inner product Tr(A B); real for Hermitian pairs.
    pub fn hs_inner(&self, other: &Self) -> Result<f64> {
        self.check_same_shape(other)?;
        let n = self.dim();
        let mut acc = 0f64;
        for i in 0..n {
            for j in 0..n {
                acc += (self.mat[(i, j)] * other.mat[(j, i)]).re;
            }
        }
        Ok(acc)
    }

    pub fn hs_norm(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Spectral norms of a Hermitian operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    pub trace_norm: f64,
    pub hs_norm: f64,
    pub op_norm: f64,
}

/// Eigendecomposition of a Hermitian matrix: ascending eigenvalues and
/// orthonormal eigenvectors as columns. Deterministic for fixed input.
pub fn eig_hermitian_matrix(mat: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let n = mat.nrows();
    if n == 1 {
        return (vec![mat[(0, 0)].re], DMatrix::identity(1, 1));
    }
    let se = nalgebra::SymmetricEigen::new(mat.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        se.eigenvalues[a]
            .partial_cmp(&se.eigenvalues[b])
            .unwrap()
            .then(a.cmp(&b))
    });
    let vals: Vec<f64> = order.iter().map(|&k| se.eigenvalues[k]).collect();
    let mut vecs = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vecs.set_column(dst, &se.eigenvectors.column(src));
    }
    (vals, vecs)
}

pub(crate) fn symmetrize(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = m.nrows();
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
        }
    }
    out
}

/// Density matrix: Hermitian, unit trace, positive semidefinite within
/// numerical tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    op: HermitianOperator,
}

impl DensityMatrix {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let tr = op.trace();
        if (tr - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidDensity(format!("trace {tr} != 1")));
        }
        let min = op.min_eigenvalue();
        if min < -1e-9 {
            return Err(Error::InvalidDensity(format!("min eigenvalue {min:.3e} < -1e-9")));
        }
        Ok(Self { op })
    }

    pub fn from_matrix(shape: SubsystemShape, mat: DMatrix<Complex64>) -> Result<Self> {
        Self::new(HermitianOperator::new(shape, mat)?)
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn into_op(self) -> HermitianOperator {
        self.op
    }

    pub fn maximally_mixed(shape: SubsystemShape) -> Self {
        let n = shape.total();
        Self {
            op: HermitianOperator::identity(shape).scale(1.0 / n as f64),
        }
    }

    /// Normalized pure-state density matrix from a (not necessarily
    /// normalized) vector.
    pub fn pure(shape: SubsystemShape, psi: &[Complex64]) -> Result<Self> {
        let norm_sqr: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if norm_sqr <= 0.0 {
            return Err(Error::InvalidDensity("zero vector".into()));
        }
        let proj = HermitianOperator::projector(shape, psi)?;
        Ok(Self {
            op: proj.scale(1.0 / norm_sqr),
        })
    }
}
