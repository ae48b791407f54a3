//! Scaling positive definite tuples to doubly stochastic form.
//!
//! For positive definite `Q_1, …, Q_n` the function
//! `f(x) = ln det(Σ e^{x_i} Q_i)` is strictly convex on the hyperplane
//! `Σ x_i = 0` and has a unique minimizer `ξ` there. With `S` any square root
//! `SᵀS = Σ e^{ξ_i} Q_i`, `T = S⁻¹` and `τ_i = e^{ξ_i}`, the tuple
//! `B_i = τ_i Tᵀ Q_i T` is doubly stochastic.
//!
//! The minimizer is found by projected Newton with Armijo backtracking. The
//! closed-form derivatives in whitened coordinates `W_i = L⁻¹ Q_i L⁻ᵀ`
//! (where `M = Σ e^{x_j} Q_j = L Lᵀ`) are
//!
//! ```text
//! ∂_i f  = e^{x_i} tr W_i
//! ∂²_ij f = δ_ij ∂_i f − e^{x_i} e^{x_j} tr(W_i W_j)
//! ```
//!
//! so the gradient at `x` is exactly the vector of traces of the candidate
//! scaled tuple, and the stopping rule `max_i |tr B_i − 1| ≤ tol` is a
//! projected-gradient test.

use crate::error::{Error, Result};
use crate::exact::{mixed_discriminant, ExactValue};
use crate::linalg::{cholesky, log_det, CholeskyFactor, Matrix, SymMatrix};
use crate::tuples::{alpha_of, MatrixTuple};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Stop when every `|tr B_i − 1|` is at most this.
    pub trace_tol: f64,
    pub max_iterations: usize,
    pub line_search_shrink: f64,
    pub armijo_constant: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            trace_tol: 1e-10,
            max_iterations: 500,
            line_search_shrink: 0.5,
            armijo_constant: 1e-4,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.trace_tol > 0.0
            && self.max_iterations > 0
            && self.line_search_shrink > 0.0
            && self.line_search_shrink < 1.0
            && self.armijo_constant > 0.0
            && self.armijo_constant < 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid solver configuration {self:?}")))
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScalingResult {
    /// Minimizer on the sum-zero hyperplane.
    pub xi: Vec<f64>,
    /// `τ_i = exp(ξ_i)`.
    pub tau: Vec<f64>,
    /// `T = S⁻¹` with `S` the transposed Cholesky factor of `Σ τ_i Q_i`.
    pub transform: Matrix,
    pub log_det_transform: f64,
    /// `B_i = τ_i Tᵀ Q_i T`.
    pub scaled: MatrixTuple,
    /// `max_i |tr B_i − 1|`.
    pub residual: f64,
    pub iterations: usize,
    /// `f(ξ)`.
    pub objective: f64,
    /// Objective value at every accepted iterate, starting point first.
    pub objective_trace: Vec<f64>,
}

fn check_point(t: &MatrixTuple, x: &[f64]) -> Result<()> {
    if x.len() != t.n() {
        return Err(Error::DimensionMismatch(format!(
            "point of length {} for a tuple of length {}",
            x.len(),
            t.n()
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("point has non-finite coordinates".into()));
    }
    Ok(())
}

fn weighted_sum(t: &MatrixTuple, x: &[f64]) -> SymMatrix {
    let mut m = SymMatrix::zeros(t.n());
    for (q, xi) in t.iter().zip(x) {
        m.add_scaled(xi.exp(), q);
    }
    m
}

/// `ln det(Σ e^{x_i} Q_i)`.
pub fn objective_f(t: &MatrixTuple, x: &[f64]) -> Result<f64> {
    check_point(t, x)?;
    log_det(&weighted_sum(t, x))
}

/// Derivative data at one point.
struct Evaluation {
    value: f64,
    factor: CholeskyFactor,
    /// `e^{x_i} L⁻¹ Q_i L⁻ᵀ`, the scaled tuple this point would produce.
    scaled: Vec<SymMatrix>,
    /// `tr` of each scaled matrix, equal to the gradient of `f`.
    gradient: Vec<f64>,
}

impl Evaluation {
    fn at(t: &MatrixTuple, x: &[f64]) -> Result<Self> {
        let factor = cholesky(&weighted_sum(t, x))?;
        let scaled = t
            .iter()
            .zip(x)
            .map(|(q, xi)| Ok(factor.whiten(q)?.scaled(xi.exp())))
            .collect::<Result<Vec<_>>>()?;
        let gradient = scaled.iter().map(SymMatrix::trace).collect();
        Ok(Self {
            value: factor.log_det(),
            factor,
            scaled,
            gradient,
        })
    }

    fn hessian(&self) -> SymMatrix {
        let n = self.scaled.len();
        let mut h = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let cross = self.scaled[i].frobenius_dot(&self.scaled[j]);
                let v = if i == j { self.gradient[i] - cross } else { -cross };
                h[i * n + j] = v;
                h[j * n + i] = v;
            }
        }
        SymMatrix::new(n, h).expect("square buffer")
    }

    fn residual(&self) -> f64 {
        self.gradient.iter().fold(0.0, |m, g| m.max((g - 1.0).abs()))
    }
}

/// `∂_i f = e^{x_i} tr(M⁻¹ Q_i)` with `M = Σ e^{x_j} Q_j`.
pub fn gradient_f(t: &MatrixTuple, x: &[f64]) -> Result<Vec<f64>> {
    check_point(t, x)?;
    Ok(Evaluation::at(t, x)?.gradient)
}

pub fn hessian_f(t: &MatrixTuple, x: &[f64]) -> Result<SymMatrix> {
    check_point(t, x)?;
    Ok(Evaluation::at(t, x)?.hessian())
}

fn center(x: &mut [f64]) {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    x.iter_mut().for_each(|v| *v -= mean);
}

/// Newton direction on the sum-zero hyperplane. The Hessian annihilates
/// `(1, …, 1)`, so `H + J/n` is positive definite exactly when `f` is
/// strictly convex on the hyperplane, and maps the hyperplane to itself.
fn newton_direction(eval: &Evaluation) -> Option<Vec<f64>> {
    let n = eval.gradient.len();
    let mut h = eval.hessian();
    h.add_scaled(1.0 / n as f64, &SymMatrix::new(n, vec![1.0; n * n]).ok()?);
    let mut r: Vec<f64> = eval.gradient.clone();
    center(&mut r);
    let factor = cholesky(&h).ok()?;
    factor.forward_solve(&mut r);
    factor.backward_solve(&mut r);
    let mut d: Vec<f64> = r.into_iter().map(|v| -v).collect();
    center(&mut d);
    d.iter().all(|v| v.is_finite()).then_some(d)
}

fn gradient_direction(eval: &Evaluation) -> Vec<f64> {
    let mut d: Vec<f64> = eval.gradient.iter().map(|g| -g).collect();
    center(&mut d);
    d
}

fn build_result(
    x: Vec<f64>,
    eval: Evaluation,
    iterations: usize,
    objective_trace: Vec<f64>,
) -> Result<ScalingResult> {
    let tau = x.iter().map(|v| v.exp()).collect();
    let transform = eval.factor.inverse_upper();
    let log_det_transform = -0.5 * eval.value;
    let residual = eval.residual();
    Ok(ScalingResult {
        xi: x,
        tau,
        transform,
        log_det_transform,
        scaled: MatrixTuple::new(eval.scaled)?,
        residual,
        iterations,
        objective: eval.value,
        objective_trace,
    })
}

/// Minimizes `f` over the sum-zero hyperplane and returns the doubly
/// stochastic scaling of `t`.
pub fn scale_to_doubly_stochastic(t: &MatrixTuple, cfg: &SolverConfig) -> Result<ScalingResult> {
    cfg.validate()?;
    let report = alpha_of(t)?;
    if let Some((matrix, &min_eigenvalue)) = report
        .per_matrix_min
        .iter()
        .enumerate()
        .find(|(_, &l)| !(l > 0.0))
    {
        return Err(Error::TupleNotPositiveDefinite {
            matrix,
            min_eigenvalue,
        });
    }

    // Start with equal traces.
    let mut x: Vec<f64> = t.traces().iter().map(|tr| -tr.ln()).collect();
    center(&mut x);
    let mut eval = Evaluation::at(t, &x)?;
    let mut trace = vec![eval.value];

    for iteration in 0..cfg.max_iterations {
        if eval.residual() <= cfg.trace_tol {
            return build_result(x, eval, iteration, trace);
        }

        let mut direction = newton_direction(&eval).unwrap_or_else(|| gradient_direction(&eval));
        let mut slope: f64 = direction.iter().zip(&eval.gradient).map(|(d, g)| d * g).sum();
        if !(slope < 0.0) {
            direction = gradient_direction(&eval);
            slope = direction.iter().zip(&eval.gradient).map(|(d, g)| d * g).sum();
        }

        // Near the optimum the decrease drops below the resolution of f, so
        // allow a few ulps of slack in the sufficient-decrease test.
        let slack = 64.0 * f64::EPSILON * (1.0 + eval.value.abs());
        let mut step = 1.0;
        let mut accepted = None;
        while step > 1e-14 {
            let mut candidate: Vec<f64> = x.iter().zip(&direction).map(|(a, d)| a + step * d).collect();
            center(&mut candidate);
            if let Ok(value) = log_det(&weighted_sum(t, &candidate)) {
                if value <= eval.value + cfg.armijo_constant * step * slope + slack {
                    accepted = Some(candidate);
                    break;
                }
            }
            step *= cfg.line_search_shrink;
        }

        match accepted {
            Some(candidate) => {
                x = candidate;
                eval = Evaluation::at(t, &x)?;
                trace.push(eval.value);
            }
            None => break,
        }
    }

    let iterations = trace.len() - 1;
    let best = build_result(x, eval, iterations, trace)?;
    if best.residual <= cfg.trace_tol {
        return Ok(best);
    }
    Err(Error::NoConvergence { best: Box::new(best) })
}

/// `P_i = τ_i Tᵀ Q_i T`.
pub fn apply_scaling(t: &MatrixTuple, transform: &Matrix, tau: &[f64]) -> Result<MatrixTuple> {
    if tau.len() != t.n() {
        return Err(Error::DimensionMismatch(format!(
            "{} weights for a tuple of length {}",
            tau.len(),
            t.n()
        )));
    }
    if transform.rows() != t.n() || transform.cols() != t.n() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} transform for dimension {}",
            transform.rows(),
            transform.cols(),
            t.n()
        )));
    }
    if tau.iter().any(|&w| !(w > 0.0)) {
        return Err(Error::InvalidArgument("scaling weights must be positive".into()));
    }
    MatrixTuple::new(
        t.iter()
            .zip(tau)
            .map(|(q, &w)| Ok(q.congruence(transform)?.scaled(w)))
            .collect::<Result<Vec<_>>>()?,
    )
}

/// For a tuple whose traces sum to `n`, scaling to doubly stochastic form
/// does not decrease the mixed discriminant. Returns `(D(Q), D(B))` and fails
/// with [`Error::PropertyViolated`] if `D(B) < D(Q)·(1 − 1e-8)`.
pub fn check_scaling_increases_discriminant(t: &MatrixTuple) -> Result<(ExactValue, ExactValue)> {
    let n = t.n() as f64;
    let total: f64 = t.traces().iter().sum();
    if (total - n).abs() > 1e-9 * n {
        return Err(Error::InvalidArgument(format!(
            "traces must sum to n = {n}, got {total}"
        )));
    }
    let before = mixed_discriminant(t)?;
    let scaled = scale_to_doubly_stochastic(t, &SolverConfig::default())?;
    let after = mixed_discriminant(&scaled.scaled)?;
    if after.value < before.value * (1.0 - 1e-8) {
        return Err(Error::PropertyViolated(format!(
            "D(B) = {:e} < D(Q) = {:e}",
            after.value, before.value
        )));
    }
    Ok((before, after))
}

/// The doubly stochastic scaling of an `α`-conditioned tuple is
/// `α⁴`-conditioned. Returns `(α_in, α_out)` and fails with
/// [`Error::PropertyViolated`] if `α_out > α_in⁴·(1 + 1e-6)`.
pub fn check_scaled_conditioning(t: &MatrixTuple) -> Result<(f64, f64)> {
    let alpha_in = alpha_of(t)?.alpha;
    let scaled = scale_to_doubly_stochastic(t, &SolverConfig::default())?;
    let alpha_out = alpha_of(&scaled.scaled)?.alpha;
    if alpha_out > alpha_in.powi(4) * (1.0 + 1e-6) {
        return Err(Error::PropertyViolated(format!(
            "scaled alpha {alpha_out} exceeds alpha^4 = {}",
            alpha_in.powi(4)
        )));
    }
    Ok((alpha_in, alpha_out))
}

/// Interval `[1 − α/n, 1 − 1/(αn)]` containing the trace of any hyperplane
/// restriction of an `α`-conditioned trace-one form on `R^n`.
pub fn hyperplane_trace_bounds(n: usize, alpha: f64) -> (f64, f64) {
    let n = n as f64;
    (1.0 - alpha / n, 1.0 - 1.0 / (alpha * n))
}

/// Alternating row/column normalization of a positive matrix to doubly
/// stochastic form.
pub fn sinkhorn_balance(a: &Matrix, tol: f64, max_iterations: usize) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("Sinkhorn balancing needs a square matrix".into()));
    }
    if a.as_slice().iter().any(|&v| !(v >= 0.0)) {
        return Err(Error::InvalidArgument("Sinkhorn balancing needs nonnegative entries".into()));
    }
    let n = a.rows();
    let mut b = a.clone();
    for _ in 0..max_iterations {
        for i in 0..n {
            let s: f64 = b.row(i).iter().sum();
            if !(s > 0.0) {
                return Err(Error::InvalidArgument(format!("row {i} has no positive entries")));
            }
            for j in 0..n {
                b[(i, j)] /= s;
            }
        }
        let mut worst: f64 = 0.0;
        for j in 0..n {
            let s: f64 = (0..n).map(|i| b[(i, j)]).sum();
            if !(s > 0.0) {
                return Err(Error::InvalidArgument(format!("column {j} has no positive entries")));
            }
            for i in 0..n {
                b[(i, j)] /= s;
            }
        }
        for i in 0..n {
            worst = worst.max((b.row(i).iter().sum::<f64>() - 1.0).abs());
        }
        if worst <= tol {
            return Ok(b);
        }
    }
    Err(Error::InvalidArgument(format!(
        "Sinkhorn balancing did not reach {tol:e} in {max_iterations} iterations"
    )))
}
