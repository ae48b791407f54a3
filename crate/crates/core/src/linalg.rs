//! Dense real linear algebra for small symmetric problems.
//!
//! Everything here is self-contained: a cyclic Jacobi eigensolver, Cholesky
//! factorization with triangular solves, LU determinants for general square
//! matrices, and restriction of quadratic forms onto subspaces.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Jacobi stops once the off-diagonal Frobenius norm drops below this
/// fraction of the initial Frobenius norm.
pub const JACOBI_REL_TOL: f64 = 1e-13;
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Cholesky pivots at or below `CHOLESKY_PIVOT_TOL * max diagonal` fail.
pub const CHOLESKY_PIVOT_TOL: f64 = 1e-13;
pub const ORTHONORMAL_TOL: f64 = 1e-10;

/// Dense row-major real matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

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
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.as_ref().len());
        let mut data = Vec::with_capacity(r * c);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != c {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {c}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(Self {
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let c = columns.len();
        let r = columns.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c);
        for (j, col) in columns.iter().enumerate() {
            if col.len() != r {
                return Err(Error::DimensionMismatch(format!(
                    "column {j} has {} entries, expected {r}",
                    col.len()
                )));
            }
            for (i, &v) in col.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let src = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(src) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest entrywise deviation between two matrices of the same shape.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Determinant by LU factorization with partial pivoting.
    pub fn determinant(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "determinant of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        Ok(lu_determinant(self.data.clone(), self.rows))
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows()).finish()
    }
}

/// Determinant of an `n x n` row-major buffer, consumed as LU workspace.
pub(crate) fn lu_determinant(mut a: Vec<f64>, n: usize) -> f64 {
    let mut det = 1.0;
    for k in 0..n {
        let mut p = k;
        let mut best = a[k * n + k].abs();
        for i in (k + 1)..n {
            let v = a[i * n + k].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            det = -det;
        }
        let pivot = a[k * n + k];
        det *= pivot;
        for i in (k + 1)..n {
            let factor = a[i * n + k] / pivot;
            if factor == 0.0 {
                continue;
            }
            for j in (k + 1)..n {
                a[i * n + j] -= factor * a[k * n + j];
            }
        }
    }
    det
}

/// Dense real symmetric matrix with full row-major storage.
#[derive(Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// Builds a symmetric matrix from row-major entries, replacing each
    /// off-diagonal pair by its average.
    pub fn new(dim: usize, mut data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("matrix dimension must be >= 1".into()));
        }
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {dim}x{dim} matrix",
                data.len()
            )));
        }
        for i in 0..dim {
            for j in (i + 1)..dim {
                let avg = 0.5 * (data[i * dim + j] + data[j * dim + i]);
                data[i * dim + j] = avg;
                data[j * dim + i] = avg;
            }
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let m = Matrix::from_rows(rows)?;
        Self::from_matrix(&m)
    }

    pub fn from_matrix(m: &Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "symmetric matrix from a {}x{} array",
                m.rows(),
                m.cols()
            )));
        }
        Self::new(m.rows(), m.as_slice().to_vec())
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be >= 1");
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, 1.0)
    }

    pub fn scalar(dim: usize, c: f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = c;
        }
        m
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * diag.len() + i] = d;
        }
        m
    }

    /// The rank-one form `u uᵀ`.
    pub fn outer(u: &[f64]) -> Self {
        let n = u.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = u[i] * u[j];
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix {
            rows: self.dim,
            cols: self.dim,
            data: self.data.clone(),
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &SymMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|v| c * v).collect(),
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, c: f64, other: &SymMatrix) {
        assert_eq!(self.dim, other.dim);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
    }

    /// Quadratic form `xᵀ M x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim);
        let mut acc = 0.0;
        for i in 0..self.dim {
            let row = self.row(i);
            let dot: f64 = row.iter().zip(x).map(|(a, b)| a * b).sum();
            acc += x[i] * dot;
        }
        acc
    }

    /// Frobenius inner product `tr(self · other)` of two symmetric matrices.
    pub fn frobenius_dot(&self, other: &SymMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    /// `Tᵀ · self · T` for a `dim x k` matrix `T`.
    pub fn congruence(&self, t: &Matrix) -> Result<SymMatrix> {
        if t.rows() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "congruence of a {0}x{0} form by a {1}x{2} matrix",
                self.dim,
                t.rows(),
                t.cols()
            )));
        }
        let mt = self.to_matrix().matmul(t)?;
        let out = t.transpose().matmul(&mt)?;
        SymMatrix::from_matrix(&out)
    }

    pub fn determinant(&self) -> f64 {
        lu_determinant(self.data.clone(), self.dim)
    }
}

impl Index<(usize, usize)> for SymMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.dim + j]
    }
}

impl fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows()).finish()
    }
}

/// Spectral decomposition `V · diag(λ) · Vᵀ` with eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal columns, column `k` paired with `eigenvalues[k]`.
    pub eigenvectors: Matrix,
}

impl EigenDecomposition {
    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    pub fn reconstruct(&self) -> SymMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = (0..n)
                    .map(|k| v[(i, k)] * self.eigenvalues[k] * v[(j, k)])
                    .sum();
            }
        }
        SymMatrix { dim: n, data }
    }
}

/// Cyclic Jacobi eigendecomposition.
pub fn eigen_decompose(m: &SymMatrix) -> Result<EigenDecomposition> {
    let n = m.dim;
    let mut a = m.data.clone();
    let mut v = Matrix::identity(n);

    let norm0 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let threshold = JACOBI_REL_TOL * norm0;
    let off_norm = |a: &[f64]| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    loop {
        let off = off_norm(&a);
        if off <= threshold {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NumericalFailure {
                residual: off,
                sweeps,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;

                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    let eigenvalues = order.iter().map(|&i| a[i * n + i]).collect();
    let mut eigenvectors = Matrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for k in 0..n {
            eigenvectors[(k, col)] = v[(k, src)];
        }
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Lower-triangular `L` with `L Lᵀ = M`.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    lower: Matrix,
}

impl CholeskyFactor {
    pub fn lower(&self) -> &Matrix {
        &self.lower
    }

    pub fn dim(&self) -> usize {
        self.lower.rows()
    }

    pub fn log_det(&self) -> f64 {
        2.0 * (0..self.dim()).map(|i| self.lower[(i, i)].ln()).sum::<f64>()
    }

    /// Solves `L y = b` in place.
    pub fn forward_solve(&self, b: &mut [f64]) {
        let l = &self.lower;
        for i in 0..b.len() {
            let mut s = b[i];
            for k in 0..i {
                s -= l[(i, k)] * b[k];
            }
            b[i] = s / l[(i, i)];
        }
    }

    /// Solves `Lᵀ x = y` in place.
    pub fn backward_solve(&self, b: &mut [f64]) {
        let l = &self.lower;
        let n = b.len();
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in (i + 1)..n {
                s -= l[(k, i)] * b[k];
            }
            b[i] = s / l[(i, i)];
        }
    }

    pub fn solve(&self, rhs: &Matrix) -> Result<Matrix> {
        let n = self.dim();
        if rhs.rows() != n {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side has {} rows, expected {n}",
                rhs.rows()
            )));
        }
        let mut out = Matrix::zeros(n, rhs.cols());
        for j in 0..rhs.cols() {
            let mut col = rhs.column(j);
            self.forward_solve(&mut col);
            self.backward_solve(&mut col);
            for (i, v) in col.into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        Ok(out)
    }

    /// `L⁻¹ Q L⁻ᵀ`, the form `Q` expressed in coordinates where `M = L Lᵀ` is
    /// the identity.
    pub fn whiten(&self, q: &SymMatrix) -> Result<SymMatrix> {
        let n = self.dim();
        if q.dim() != n {
            return Err(Error::DimensionMismatch(format!(
                "whitening a {0}x{0} form with a {n}x{n} factor",
                q.dim()
            )));
        }
        // X = L⁻¹ Q column by column; Q symmetric so row i of Q is column i.
        let mut x = Matrix::zeros(n, n);
        for j in 0..n {
            let mut col = q.row(j).to_vec();
            self.forward_solve(&mut col);
            for i in 0..n {
                x[(i, j)] = col[i];
            }
        }
        // W = L⁻¹ Xᵀ.
        let mut w = vec![0.0; n * n];
        for j in 0..n {
            let mut col = x.row(j).to_vec();
            self.forward_solve(&mut col);
            for i in 0..n {
                w[i * n + j] = col[i];
            }
        }
        SymMatrix::new(n, w)
    }

    /// `L⁻ᵀ`, the inverse of the upper factor `S = Lᵀ`.
    pub fn inverse_upper(&self) -> Matrix {
        let n = self.dim();
        let mut t = Matrix::zeros(n, n);
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            self.backward_solve(&mut e);
            for i in 0..n {
                t[(i, j)] = e[i];
            }
        }
        t
    }
}

pub fn cholesky(m: &SymMatrix) -> Result<CholeskyFactor> {
    let n = m.dim;
    let max_diag = m.diag().into_iter().fold(f64::NEG_INFINITY, f64::max);
    let tol = CHOLESKY_PIVOT_TOL * max_diag.max(0.0);
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > tol) {
            return Err(Error::NotPositiveDefinite { pivot: j, value: d });
        }
        let djj = d.sqrt();
        l[(j, j)] = djj;
        for i in (j + 1)..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(CholeskyFactor { lower: l })
}

pub fn log_det(m: &SymMatrix) -> Result<f64> {
    Ok(cholesky(m)?.log_det())
}

pub fn solve_spd(m: &SymMatrix, rhs: &Matrix) -> Result<Matrix> {
    cholesky(m)?.solve(rhs)
}

/// Largest entrywise deviation of `BᵀB` from the identity.
pub fn orthonormality_defect(basis: &Matrix) -> f64 {
    let k = basis.cols();
    let mut worst: f64 = 0.0;
    for a in 0..k {
        for b in a..k {
            let dot: f64 = (0..basis.rows())
                .map(|i| basis[(i, a)] * basis[(i, b)])
                .sum();
            let target = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((dot - target).abs());
        }
    }
    worst
}

/// Matrix of the quadratic form `m` restricted to the span of `basis`.
pub fn restrict_form(m: &SymMatrix, basis: &Matrix) -> Result<SymMatrix> {
    if basis.rows() != m.dim() {
        return Err(Error::DimensionMismatch(format!(
            "basis has {} rows, form has dimension {}",
            basis.rows(),
            m.dim()
        )));
    }
    if basis.cols() == 0 || basis.cols() > m.dim() {
        return Err(Error::DimensionMismatch(format!(
            "subspace dimension {} not in 1..={}",
            basis.cols(),
            m.dim()
        )));
    }
    let deviation = orthonormality_defect(basis);
    if deviation > ORTHONORMAL_TOL {
        return Err(Error::BasisNotOrthonormal { deviation });
    }
    m.congruence(basis)
}

/// Householder reflection `I - 2vvᵀ/vᵀv` sending `e_n` to `±u`; its first
/// `n - 1` columns are an orthonormal basis of `u^⊥`.
pub fn orthogonal_complement(u: &[f64]) -> Result<Matrix> {
    let n = u.len();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "orthogonal complement needs dimension >= 2".into(),
        ));
    }
    let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::NotUnitVector { norm });
    }
    // v = e_n - s u with s = -sign(u_n), so v_n = 1 + |u_n| never cancels.
    let s = if u[n - 1] >= 0.0 { -1.0 } else { 1.0 };
    let mut v: Vec<f64> = u.iter().map(|&x| -s * x).collect();
    v[n - 1] += 1.0;
    let vv: f64 = v.iter().map(|x| x * x).sum();
    let mut basis = Matrix::zeros(n, n - 1);
    for i in 0..n {
        for j in 0..(n - 1) {
            let delta = if i == j { 1.0 } else { 0.0 };
            basis[(i, j)] = delta - 2.0 * v[i] * v[j] / vv;
        }
    }
    Ok(basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn m2() -> SymMatrix {
        SymMatrix::from_rows(&[[2.0, 1.0], [1.0, 2.0]]).unwrap()
    }

    #[test]
    fn construction_symmetrizes_by_averaging() {
        let m = SymMatrix::from_rows(&[[1.0, 2.0], [4.0, 5.0]]).unwrap();
        assert_eq!(m[(0, 1)], 3.0);
        assert_eq!(m[(1, 0)], 3.0);
        assert!(SymMatrix::new(0, vec![]).is_err());
        assert!(SymMatrix::new(2, vec![1.0; 3]).is_err());
    }

    #[test]
    fn eigen_identity_and_diagonal() {
        let e = eigen_decompose(&SymMatrix::identity(3)).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 1.0, 1.0]);

        let e = eigen_decompose(&SymMatrix::diagonal(&[5.0, 2.0])).unwrap();
        assert_eq!(e.eigenvalues, vec![2.0, 5.0]);
        // Columns are a permutation of the standard basis.
        assert_eq!(e.eigenvectors[(1, 0)].abs(), 1.0);
        assert_eq!(e.eigenvectors[(0, 1)].abs(), 1.0);
    }

    #[test]
    fn eigen_two_by_two() {
        // λ² − 4λ + 3 = 0.
        let e = eigen_decompose(&m2()).unwrap();
        assert_relative_eq!(e.eigenvalues[0], 1.0, epsilon = 1e-14);
        assert_relative_eq!(e.eigenvalues[1], 3.0, epsilon = 1e-14);
        assert!(e.reconstruct().max_abs_diff(&m2()) < 1e-14);
    }

    #[test]
    fn eigen_of_zero_matrix() {
        let e = eigen_decompose(&SymMatrix::zeros(4)).unwrap();
        assert!(e.eigenvalues.iter().all(|&l| l == 0.0));
    }

    #[test]
    fn cholesky_examples() {
        let c = cholesky(&SymMatrix::identity(3)).unwrap();
        assert_eq!(c.lower(), &Matrix::identity(3));

        let c = cholesky(&SymMatrix::diagonal(&[4.0, 9.0])).unwrap();
        assert_eq!(c.lower(), &Matrix::from_diagonal(&[2.0, 3.0]));

        let c = cholesky(&m2()).unwrap();
        let l = c.lower();
        assert_relative_eq!(l[(0, 0)], 2f64.sqrt(), epsilon = 1e-15);
        assert_eq!(l[(0, 1)], 0.0);
        assert_relative_eq!(l[(1, 0)], 1.0 / 2f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(l[(1, 1)], 1.5f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn cholesky_reports_failing_pivot() {
        let m = SymMatrix::from_rows(&[[1.0, 0.0, 0.0], [0.0, 1.0, 1.0], [0.0, 1.0, 1.0]]).unwrap();
        match cholesky(&m) {
            Err(Error::NotPositiveDefinite { pivot, .. }) => assert_eq!(pivot, 2),
            other => panic!("expected failure, got {other:?}"),
        }
        assert!(matches!(
            cholesky(&SymMatrix::diagonal(&[-1.0, 1.0])),
            Err(Error::NotPositiveDefinite { pivot: 0, .. })
        ));
    }

    #[test]
    fn log_det_examples() {
        assert_eq!(log_det(&SymMatrix::identity(5)).unwrap(), 0.0);
        let e = std::f64::consts::E;
        assert_relative_eq!(log_det(&SymMatrix::diagonal(&[e, e * e])).unwrap(), 3.0, epsilon = 1e-15);
        assert_relative_eq!(log_det(&m2()).unwrap(), 3f64.ln(), epsilon = 1e-15);
        assert!(log_det(&SymMatrix::diagonal(&[1.0, 0.0])).is_err());
    }

    #[test]
    fn solve_spd_examples() {
        let v = Matrix::from_columns(&[vec![0.3, -1.2, 4.0]]).unwrap();
        assert_eq!(solve_spd(&SymMatrix::identity(3), &v).unwrap(), v);

        let x = solve_spd(
            &SymMatrix::diagonal(&[2.0, 4.0]),
            &Matrix::from_columns(&[vec![2.0, 4.0]]).unwrap(),
        )
        .unwrap();
        assert!(x.column(0).iter().all(|v| (v - 1.0).abs() < 1e-15));

        let x = solve_spd(&m2(), &Matrix::from_columns(&[vec![3.0, 3.0]]).unwrap()).unwrap();
        assert_relative_eq!(x[(0, 0)], 1.0, epsilon = 1e-15);
        assert_relative_eq!(x[(1, 0)], 1.0, epsilon = 1e-15);

        assert!(matches!(
            solve_spd(&m2(), &Matrix::zeros(3, 1)),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn restrict_form_examples() {
        let basis = Matrix::from_columns(&[
            vec![1.0 / 2f64.sqrt(), 1.0 / 2f64.sqrt(), 0.0],
            vec![0.0, 0.0, 1.0],
        ])
        .unwrap();
        let r = restrict_form(&SymMatrix::identity(3), &basis).unwrap();
        assert!(r.max_abs_diff(&SymMatrix::identity(2)) < 1e-15);

        let e12 = Matrix::from_columns(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        let r = restrict_form(&SymMatrix::diagonal(&[1.0, 2.0, 3.0]), &e12).unwrap();
        assert_eq!(r, SymMatrix::diagonal(&[1.0, 2.0]));

        let u = Matrix::from_columns(&[vec![1.0 / 2f64.sqrt(), 1.0 / 2f64.sqrt()]]).unwrap();
        let r = restrict_form(&m2(), &u).unwrap();
        assert_eq!(r.dim(), 1);
        assert_relative_eq!(r[(0, 0)], 3.0, epsilon = 1e-15);
    }

    #[test]
    fn restrict_form_rejects_skewed_basis() {
        let skew = Matrix::from_columns(&[vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
        assert!(matches!(
            restrict_form(&m2(), &skew),
            Err(Error::BasisNotOrthonormal { .. })
        ));
    }

    #[test]
    fn complement_is_orthonormal_and_orthogonal_to_u() {
        for u in [vec![0.0, 0.0, 1.0], vec![0.0, 0.0, -1.0], vec![0.6, 0.0, 0.8], vec![1.0, 0.0, 0.0]] {
            let b = orthogonal_complement(&u).unwrap();
            assert!(orthonormality_defect(&b) < 1e-15);
            for j in 0..2 {
                let dot: f64 = (0..3).map(|i| b[(i, j)] * u[i]).sum();
                assert!(dot.abs() < 1e-15);
            }
        }
        assert!(matches!(
            orthogonal_complement(&[1.0, 1.0]),
            Err(Error::NotUnitVector { .. })
        ));
    }

    #[test]
    fn lu_determinant_with_pivoting() {
        let m = Matrix::from_rows(&[[0.0, 2.0], [3.0, 1.0]]).unwrap();
        assert_eq!(m.determinant().unwrap(), -6.0);
        let singular = Matrix::from_rows(&[[1.0, 2.0], [2.0, 4.0]]).unwrap();
        assert_eq!(singular.determinant().unwrap(), 0.0);
    }
}
