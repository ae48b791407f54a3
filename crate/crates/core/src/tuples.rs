//! Square tuples of symmetric matrices and their structural predicates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{eigen_decompose, orthogonal_complement, restrict_form, Matrix, SymMatrix};

/// An ordered `n`-tuple of `n x n` symmetric matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixTuple {
    matrices: Vec<SymMatrix>,
}

impl MatrixTuple {
    pub fn new(matrices: Vec<SymMatrix>) -> Result<Self> {
        let n = matrices.len();
        if n == 0 {
            return Err(Error::InvalidArgument("tuple must contain at least one matrix".into()));
        }
        if let Some((i, m)) = matrices.iter().enumerate().find(|(_, m)| m.dim() != n) {
            return Err(Error::DimensionMismatch(format!(
                "matrix {i} has dimension {}, tuple length is {n}",
                m.dim()
            )));
        }
        Ok(Self { matrices })
    }

    /// `n` copies of `I / n`, the uniform doubly stochastic tuple.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("tuple must contain at least one matrix".into()));
        }
        Self::new(vec![SymMatrix::scalar(n, 1.0 / n as f64); n])
    }

    pub fn n(&self) -> usize {
        self.matrices.len()
    }

    pub fn matrices(&self) -> &[SymMatrix] {
        &self.matrices
    }

    pub fn into_matrices(self) -> Vec<SymMatrix> {
        self.matrices
    }

    pub fn iter(&self) -> std::slice::Iter<'_, SymMatrix> {
        self.matrices.iter()
    }

    pub fn sum(&self) -> SymMatrix {
        let mut acc = SymMatrix::zeros(self.n());
        for q in &self.matrices {
            acc.add_scaled(1.0, q);
        }
        acc
    }

    pub fn traces(&self) -> Vec<f64> {
        self.matrices.iter().map(SymMatrix::trace).collect()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            matrices: self.matrices.iter().map(|q| q.scaled(c)).collect(),
        }
    }

    /// Rescales by one positive scalar so that the traces sum to `n`.
    pub fn trace_normalized(&self) -> Result<Self> {
        let total: f64 = self.traces().iter().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "cannot trace-normalize a tuple with total trace {total}"
            )));
        }
        Ok(self.scaled(self.n() as f64 / total))
    }

    /// Replaces the matrix in slot `i`.
    pub fn with_slot(&self, i: usize, q: SymMatrix) -> Result<Self> {
        let mut matrices = self.matrices.clone();
        matrices[i] = q;
        Self::new(matrices)
    }

    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        Self::new(order.iter().map(|&i| self.matrices[i].clone()).collect())
    }
}

impl std::ops::Index<usize> for MatrixTuple {
    type Output = SymMatrix;

    fn index(&self, i: usize) -> &SymMatrix {
        &self.matrices[i]
    }
}

/// Spectral extremes of each matrix and the tuple's conditioning number.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub per_matrix_min: Vec<f64>,
    pub per_matrix_max: Vec<f64>,
    /// Smallest `α` with `λ_max(Q_i) ≤ α λ_min(Q_j)` for all `i, j`;
    /// infinite when some matrix is not positive definite.
    pub alpha: f64,
    pub positive_definite: bool,
}

pub fn alpha_of(t: &MatrixTuple) -> Result<ConditionReport> {
    let mut per_matrix_min = Vec::with_capacity(t.n());
    let mut per_matrix_max = Vec::with_capacity(t.n());
    for q in t.iter() {
        let eig = eigen_decompose(q)?;
        per_matrix_min.push(eig.min());
        per_matrix_max.push(eig.max());
    }
    let lo = per_matrix_min.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = per_matrix_max.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let positive_definite = lo > 0.0;
    let alpha = if positive_definite { (hi / lo).max(1.0) } else { f64::INFINITY };
    Ok(ConditionReport {
        per_matrix_min,
        per_matrix_max,
        alpha,
        positive_definite,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StochasticityReport {
    /// Max entry of `|Σ Q_i − I|`.
    pub sum_deviation: f64,
    /// `|tr Q_i − 1|` per matrix.
    pub trace_deviations: Vec<f64>,
    /// Smallest eigenvalue over the whole tuple.
    pub min_eigenvalue: f64,
    pub passes: bool,
}

pub fn check_doubly_stochastic(t: &MatrixTuple, tol: f64) -> Result<StochasticityReport> {
    let sum = t.sum();
    let sum_deviation = sum.max_abs_diff(&SymMatrix::identity(t.n()));
    let trace_deviations: Vec<f64> = t.traces().iter().map(|tr| (tr - 1.0).abs()).collect();
    let mut min_eigenvalue = f64::INFINITY;
    for q in t.iter() {
        min_eigenvalue = min_eigenvalue.min(eigen_decompose(q)?.min());
    }
    let passes = sum_deviation <= tol
        && trace_deviations.iter().all(|&d| d <= tol)
        && min_eigenvalue >= -tol;
    Ok(StochasticityReport {
        sum_deviation,
        trace_deviations,
        min_eigenvalue,
        passes,
    })
}

/// Diagonal embedding: row `i` of `a` becomes the diagonal of `Q_i`.
pub fn from_matrix_rows(a: &Matrix) -> Result<MatrixTuple> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "diagonal embedding needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    MatrixTuple::new((0..a.rows()).map(|i| SymMatrix::diagonal(a.row(i))).collect())
}

/// Restricts `Q_1, …, Q_{n−1}` onto `u^⊥`. The dropped last slot stands for
/// the rank-one form `⟨u, x⟩²`.
pub fn restrict_tuple(t: &MatrixTuple, u: &[f64]) -> Result<MatrixTuple> {
    let n = t.n();
    if n < 2 {
        return Err(Error::InvalidArgument("restriction needs n >= 2".into()));
    }
    if u.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} for a tuple of dimension {n}",
            u.len()
        )));
    }
    let basis = orthogonal_complement(u)?;
    let restricted = t.matrices[..n - 1]
        .iter()
        .map(|q| restrict_form(q, &basis))
        .collect::<Result<Vec<_>>>()?;
    MatrixTuple::new(restricted)
}

/// Haar-distributed orthogonal matrix via Gram–Schmidt on a Gaussian matrix.
pub fn random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix {
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        // Two passes of modified Gram–Schmidt.
        for _ in 0..2 {
            for c in &cols {
                let dot: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
                for (vi, ci) in v.iter_mut().zip(c) {
                    *vi -= dot * ci;
                }
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= norm);
        cols.push(v);
    }
    Matrix::from_columns(&cols).expect("columns share a length")
}

pub fn random_unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// `V · diag(λ) · Vᵀ`.
pub fn from_spectrum(frame: &Matrix, eigenvalues: &[f64]) -> SymMatrix {
    let n = eigenvalues.len();
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v: f64 = (0..n).map(|k| frame[(i, k)] * eigenvalues[k] * frame[(j, k)]).sum();
            data[i * n + j] = v;
            data[j * n + i] = v;
        }
    }
    SymMatrix::new(n, data).expect("square data")
}

/// Random positive definite `α`-conditioned matrix drawn from `rng`.
pub fn random_conditioned_matrix<R: Rng + ?Sized>(n: usize, alpha: f64, rng: &mut R) -> SymMatrix {
    if alpha - 1.0 <= 1e-9 {
        return SymMatrix::identity(n);
    }
    // Keep the spectrum a hair inside [1, α] so roundoff in V·Λ·Vᵀ cannot
    // push the measured ratio past α.
    let lo = 1.0 + 1e-12 * alpha;
    let hi = alpha * (1.0 - 1e-12);
    let frame = random_orthogonal(n, rng);
    let eigenvalues: Vec<f64> = (0..n).map(|_| rng.random_range(lo..=hi)).collect();
    from_spectrum(&frame, &eigenvalues)
}

/// Seeded positive definite tuple with every eigenvalue in `[1, alpha_target]`.
pub fn random_tuple(n: usize, alpha_target: f64, seed: u64) -> Result<MatrixTuple> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    if !(alpha_target >= 1.0) || !alpha_target.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "alpha must be a finite number >= 1, got {alpha_target}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    MatrixTuple::new(
        (0..n)
            .map(|_| random_conditioned_matrix(n, alpha_target, &mut rng))
            .collect(),
    )
}
