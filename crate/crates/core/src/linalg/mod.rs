//! Real symmetric eigensolvers and small dense helpers.
//!
//! Two storage formats: [`SymTridiagonal`] for walk matrices, handled by
//! Sturm bisection plus inverse iteration, and [`DenseSymmetric`] for
//! assembled Hamiltonians, handled by cyclic Jacobi. [`Matrix`] is a plain
//! row-major rectangular matrix for non-symmetric work (conjugations,
//! products, basis changes).

mod dense;
mod tridiag;

pub use dense::{
    eig_dense, eig_dense_capped, householder_tridiagonalize, is_psd, rayleigh, spectral_norm,
    DEFAULT_DENSE_CAP,
};
pub use tridiag::{eig_tridiagonal, eigenvalue_k, sturm_count};

use crate::error::{Error, Result};

/// Default symmetry tolerance for [`DenseSymmetric`].
pub const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::InvalidMatrix("empty diagonal".into()));
        }
        if offdiag.len() + 1 != diag.len() {
            return Err(Error::InvalidMatrix(format!(
                "off-diagonal length {} does not match diagonal length {}",
                offdiag.len(),
                diag.len()
            )));
        }
        if diag.iter().chain(&offdiag).any(|x| !x.is_finite()) {
            return Err(Error::InvalidMatrix("non-finite entry".into()));
        }
        Ok(Self { diag, offdiag })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    /// Add `w` to diagonal entry `i` (0-based).
    pub fn add_diag(&mut self, i: usize, w: f64) {
        self.diag[i] += w;
    }

    /// Infinity norm, an upper bound on the spectral radius.
    pub fn norm_inf(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i].abs();
                if i > 0 {
                    s += self.offdiag[i - 1].abs();
                }
                if i + 1 < n {
                    s += self.offdiag[i].abs();
                }
                s
            })
            .fold(0.0, f64::max)
    }

    /// Direct sum, with no coupling between the two blocks.
    pub fn direct_sum(&self, other: &SymTridiagonal) -> SymTridiagonal {
        let mut diag = self.diag.clone();
        diag.extend_from_slice(&other.diag);
        let mut offdiag = self.offdiag.clone();
        offdiag.push(0.0);
        offdiag.extend_from_slice(&other.offdiag);
        SymTridiagonal { diag, offdiag }
    }

    pub fn to_dense(&self) -> DenseSymmetric {
        let n = self.dim();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = self.diag[i];
            if i + 1 < n {
                data[i * n + i + 1] = self.offdiag[i];
                data[(i + 1) * n + i] = self.offdiag[i];
            }
        }
        DenseSymmetric {
            dim: n,
            data,
            tol: SYMMETRY_TOL,
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.offdiag[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.offdiag[i] * x[i + 1];
                }
                s
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseSymmetric {
    dim: usize,
    data: Vec<f64>,
    tol: f64,
}

impl DenseSymmetric {
    /// Row-major construction with the default symmetry tolerance.
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(dim, data, SYMMETRY_TOL)
    }

    pub fn with_tolerance(dim: usize, data: Vec<f64>, tol: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidMatrix("dimension must be positive".into()));
        }
        if data.len() != dim * dim {
            return Err(Error::InvalidMatrix(format!(
                "expected {} entries, got {}",
                dim * dim,
                data.len()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidMatrix("non-finite entry".into()));
        }
        let mut deviation: f64 = 0.0;
        for i in 0..dim {
            for j in i + 1..dim {
                deviation = deviation.max((data[i * dim + j] - data[j * dim + i]).abs());
            }
        }
        if deviation > tol {
            return Err(Error::AsymmetricInput {
                deviation,
                tolerance: tol,
            });
        }
        Ok(Self { dim, data, tol })
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self::new(dim, data)
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim],
            tol: SYMMETRY_TOL,
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = 1.0;
        }
        m
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m.data[i * values.len() + i] = *v;
        }
        m
    }

    /// Symmetrize a general square matrix, failing if it is too far from symmetric.
    pub fn from_matrix(m: &Matrix, tol: f64) -> Result<Self> {
        if m.rows != m.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} is not square",
                m.rows, m.cols
            )));
        }
        let raw = Self::with_tolerance(m.rows, m.data.clone(), tol)?;
        let n = raw.dim;
        let mut data = raw.data;
        for i in 0..n {
            for j in i + 1..n {
                let avg = 0.5 * (data[i * n + j] + data[j * n + i]);
                data[i * n + j] = avg;
                data[j * n + i] = avg;
            }
        }
        Ok(Self {
            dim: n,
            data,
            tol: SYMMETRY_TOL,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    /// Add `v` to both (i, j) and (j, i); once on the diagonal.
    pub fn add_sym(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] += v;
        if i != j {
            self.data[j * self.dim + i] += v;
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim;
        (0..n)
            .map(|i| {
                self.data[i * n..(i + 1) * n]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|x| x * s).collect(),
            tol: self.tol,
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!(
                "{} vs {}",
                self.dim, other.dim
            )));
        }
        Ok(Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f(*a, *b))
                .collect(),
            tol: self.tol,
        })
    }

    /// Principal submatrix on the given indices, in the given order.
    pub fn submatrix(&self, idx: &[usize]) -> Self {
        let k = idx.len();
        let mut data = Vec::with_capacity(k * k);
        for &i in idx {
            for &j in idx {
                data.push(self.get(i, j));
            }
        }
        Self {
            dim: k,
            data,
            tol: self.tol,
        }
    }

    /// Embed into a larger zero matrix with the top-left corner at `offset`.
    pub fn embed(&self, dim: usize, offset: usize) -> Result<Self> {
        if offset + self.dim > dim {
            return Err(Error::DimensionMismatch(format!(
                "block of size {} at offset {} does not fit in {}",
                self.dim, offset, dim
            )));
        }
        let mut out = Self::zeros(dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.data[(offset + i) * dim + offset + j] = self.get(i, j);
            }
        }
        Ok(out)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix {
            rows: self.dim,
            cols: self.dim,
            data: self.data.clone(),
        }
    }

    /// `Qᵀ M Q` for a (possibly rectangular) `Q`.
    pub fn congruence(&self, q: &Matrix) -> Result<Self> {
        let mq = self.to_matrix().matmul(q)?;
        let out = q.transpose().matmul(&mq)?;
        Self::from_matrix(&out, 1e-9 * (1.0 + self.frobenius()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Row-major rectangular real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, cols: &[Vec<f64>]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, x) in c.iter().take(rows).enumerate() {
                m.data[i * cols.len() + j] = *x;
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                let orow = &other.data[k * other.cols..(k + 1) * other.cols];
                for (r, b) in row.iter_mut().zip(orow) {
                    *r += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Largest entry of `|MᵀM − I|`.
    pub fn orthogonality_defect(&self) -> f64 {
        let g = self.transpose().matmul(self).expect("shapes agree");
        g.max_abs_diff(&Matrix::identity(self.cols))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// `eigenvectors[j]` pairs with `eigenvalues[j]`.
    pub eigenvectors: Option<Vec<Vec<f64>>>,
    /// Bound on `‖Mv − λv‖∞` over returned pairs.
    pub residual: f64,
}

impl Spectrum {
    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Collapse pairs of equal eigenvalues produced by realification.
    /// Expects every eigenvalue to appear an even number of times.
    pub fn halve_multiplicities(&self) -> Vec<f64> {
        self.eigenvalues.iter().step_by(2).copied().collect()
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_rejects_bad_input() {
        assert!(SymTridiagonal::new(vec![], vec![]).is_err());
        assert!(SymTridiagonal::new(vec![1.0, 2.0], vec![]).is_err());
        assert!(matches!(
            SymTridiagonal::new(vec![f64::NAN], vec![]),
            Err(Error::InvalidMatrix(_))
        ));
    }

    #[test]
    fn dense_rejects_asymmetry() {
        let e = DenseSymmetric::new(2, vec![1.0, 0.5, 0.4, 1.0]).unwrap_err();
        assert!(matches!(e, Error::AsymmetricInput { .. }));
    }

    #[test]
    fn congruence_with_identity_is_noop() {
        let m = DenseSymmetric::new(2, vec![1.0, 2.0, 2.0, 3.0]).unwrap();
        let c = m.congruence(&Matrix::identity(2)).unwrap();
        assert_eq!(c, m);
    }

    #[test]
    fn direct_sum_decouples() {
        let a = SymTridiagonal::new(vec![1.0, 2.0], vec![0.3]).unwrap();
        let b = SymTridiagonal::new(vec![5.0], vec![]).unwrap();
        let s = a.direct_sum(&b);
        assert_eq!(s.diag(), &[1.0, 2.0, 5.0]);
        assert_eq!(s.offdiag(), &[0.3, 0.0]);
    }
}
