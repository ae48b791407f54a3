//! Certified log-scale bounds on mixed discriminants and permanents.
//!
//! An input tuple is scaled to a doubly stochastic tuple `B`, bounded there
//! from below by `n!/n^n` and from above by `n^{α⁴} e^{−(n−1)}` (capped at 1),
//! and the bounds are carried back through
//! `D(B) = (det T)² (Π τ_i) D(Q)`.
//! Everything is kept in the log domain.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scaling::{scale_to_doubly_stochastic, ScalingResult, SolverConfig};
use crate::tuples::{alpha_of, MatrixTuple};

/// Slack allowed on row sums and entry caps of matrix hypotheses.
pub const ROW_SUM_TOL: f64 = 1e-10;
pub const ENTRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscriminantEstimate {
    pub log_lower: f64,
    pub log_upper: f64,
    /// `ln((det T)⁻² (Π τ_i)⁻¹)`, so that `ln D(Q) = ln D(B) + log_correction`.
    pub log_correction: f64,
    pub alpha_input: f64,
    pub alpha_scaled: f64,
    pub n: usize,
}

impl DiscriminantEstimate {
    pub fn width(&self) -> f64 {
        self.log_upper - self.log_lower
    }

    pub fn contains(&self, log_value: f64, slack: f64) -> bool {
        self.log_lower - slack <= log_value && log_value <= self.log_upper + slack
    }
}

fn ln_factorial(n: usize) -> f64 {
    libm::lgamma(n as f64 + 1.0)
}

/// `ln(n!/n^n)`.
pub fn bapat_lower(n: usize) -> f64 {
    assert!(n >= 1, "n must be >= 1");
    ln_factorial(n) - n as f64 * (n as f64).ln()
}

/// `α⁴ ln n − (n − 1)` without the cap.
pub fn conditioned_exponent(n: usize, alpha: f64) -> f64 {
    alpha.powi(4) * (n as f64).ln() - (n as f64 - 1.0)
}

/// `min(0, α⁴ ln n − (n − 1))`: the log upper bound for an
/// `α`-conditioned doubly stochastic tuple, which also never exceeds 1.
pub fn conditioned_upper(n: usize, alpha: f64) -> f64 {
    assert!(n >= 1, "n must be >= 1");
    assert!(alpha >= 1.0, "alpha must be >= 1");
    conditioned_exponent(n, alpha).min(0.0)
}

/// Bounds `ln D(t)` by scaling; also returns the scaling diagnostics.
pub fn estimate_with_scaling(
    t: &MatrixTuple,
    cfg: &SolverConfig,
) -> Result<(DiscriminantEstimate, ScalingResult)> {
    let alpha_input = alpha_of(t)?.alpha;
    let scaling = scale_to_doubly_stochastic(t, cfg)?;
    let alpha_scaled = alpha_of(&scaling.scaled)?.alpha;
    let n = t.n();
    let log_tau: f64 = scaling.tau.iter().map(|w| w.ln()).sum();
    let log_correction = -2.0 * scaling.log_det_transform - log_tau;
    let upper = conditioned_upper(n, alpha_input).min(conditioned_upper(n, alpha_scaled.max(1.0)));
    let estimate = DiscriminantEstimate {
        log_lower: log_correction + bapat_lower(n),
        log_upper: log_correction + upper,
        log_correction,
        alpha_input,
        alpha_scaled,
        n,
    };
    Ok((estimate, scaling))
}

pub fn estimate(t: &MatrixTuple, cfg: &SolverConfig) -> Result<DiscriminantEstimate> {
    estimate_with_scaling(t, cfg).map(|(e, _)| e)
}

/// `ln Π (r_i!)^{1/r_i} / r_i`, an upper bound on `ln per B` for a stochastic
/// `B` with `0 ≤ b_ij ≤ 1/r_i`.
pub fn bregman_minc_upper(b: &Matrix, r: &[u32]) -> Result<f64> {
    let n = b.rows();
    if !b.is_square() || r.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix with {} row bounds",
            b.rows(),
            b.cols(),
            r.len()
        )));
    }
    for (i, &ri) in r.iter().enumerate() {
        if ri == 0 {
            return Err(Error::HypothesisViolated {
                row: i,
                reason: "row bound r_i must be a positive integer".into(),
            });
        }
        let row = b.row(i);
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > ROW_SUM_TOL {
            return Err(Error::HypothesisViolated {
                row: i,
                reason: format!("row sums to {sum}, not 1"),
            });
        }
        let cap = 1.0 / ri as f64 + ENTRY_TOL;
        if let Some(&v) = row.iter().find(|&&v| !(v >= -ENTRY_TOL && v <= cap)) {
            return Err(Error::HypothesisViolated {
                row: i,
                reason: format!("entry {v} outside [0, 1/{ri}]"),
            });
        }
    }
    Ok(r
        .iter()
        .map(|&ri| {
            let ri = ri as usize;
            ln_factorial(ri) / ri as f64 - (ri as f64).ln()
        })
        .sum())
}

/// Log-scale interval for `per B`, `B` doubly stochastic with entries at most
/// `α/n`: van der Waerden below, Bregman–Minc with `r_i = ⌊n/α⌋` above.
pub fn permanent_sandwich(b: &Matrix, alpha: f64) -> Result<(f64, f64)> {
    let n = b.rows();
    if !b.is_square() || n == 0 {
        return Err(Error::DimensionMismatch("permanent bounds need a nonempty square matrix".into()));
    }
    if !(alpha >= 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must be >= 1, got {alpha}")));
    }
    let cap = alpha / n as f64 + ENTRY_TOL;
    for i in 0..n {
        if let Some(&v) = b.row(i).iter().find(|&&v| v > cap) {
            return Err(Error::HypothesisViolated {
                row: i,
                reason: format!("entry {v} exceeds alpha/n = {}", alpha / n as f64),
            });
        }
    }
    for j in 0..n {
        let sum: f64 = (0..n).map(|i| b[(i, j)]).sum();
        if (sum - 1.0).abs() > ROW_SUM_TOL {
            return Err(Error::HypothesisViolated {
                row: j,
                reason: format!("column {j} sums to {sum}, not 1"),
            });
        }
    }
    // Tiny relative nudge so that n/α landing a rounding error below an
    // integer still yields that integer.
    let r = ((n as f64 / alpha) * (1.0 + 1e-12)).floor().max(1.0) as u32;
    let upper = bregman_minc_upper(b, &vec![r; n])?;
    Ok((bapat_lower(n), upper))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{mixed_discriminant, permanent_ryser};
    use crate::tuples::from_matrix_rows;
    use approx::assert_relative_eq;

    #[test]
    fn bapat_lower_examples() {
        assert_eq!(bapat_lower(1), 0.0);
        assert_relative_eq!(bapat_lower(2), 0.5f64.ln(), epsilon = 1e-15);
        assert_relative_eq!(bapat_lower(3), (2.0f64 / 9.0).ln(), epsilon = 1e-14);
    }

    #[test]
    fn conditioned_upper_examples() {
        assert_eq!(conditioned_upper(1, 1.0), 0.0);
        assert_eq!(conditioned_upper(1, 7.5), 0.0);
        assert_relative_eq!(conditioned_upper(3, 1.0), 3f64.ln() - 2.0, epsilon = 1e-15);
        assert_relative_eq!(conditioned_upper(3, 1.0), -0.901_387_711_9, epsilon = 1e-9);
        assert_eq!(conditioned_upper(10, 2.0), 0.0);
    }

    #[test]
    fn uniform_tuple_estimate_hits_the_endpoints() {
        let t = MatrixTuple::uniform(3).unwrap();
        let e = estimate(&t, &SolverConfig::default()).unwrap();
        assert!(e.log_correction.abs() < 1e-12);
        assert_relative_eq!(e.log_lower, (2.0f64 / 9.0).ln(), epsilon = 1e-12);
        assert_relative_eq!(e.log_upper, 3f64.ln() - 2.0, epsilon = 1e-12);
        let exact = mixed_discriminant(&t).unwrap().log_abs;
        assert_relative_eq!(exact, e.log_lower, epsilon = 1e-12);
    }

    #[test]
    fn diagonal_embedding_estimate_contains_permanent() {
        let a = Matrix::from_rows(&[[2.0, 1.0], [1.0, 2.0]]).unwrap();
        let t = from_matrix_rows(&a).unwrap();
        let e = estimate(&t, &SolverConfig::default()).unwrap();
        let exact = mixed_discriminant(&t).unwrap();
        assert_eq!(exact.value, 5.0);
        assert!(e.contains(exact.log_abs, 1e-9), "{e:?}");
        // The scaled tuple is the 2x2 Sinkhorn limit with permanent 5/9.
        assert_relative_eq!(exact.log_abs - e.log_correction, (5.0f64 / 9.0).ln(), epsilon = 1e-9);
    }

    #[test]
    fn bregman_minc_examples() {
        let perm = Matrix::from_rows(&[[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        assert_eq!(bregman_minc_upper(&perm, &[1, 1, 1]).unwrap(), 0.0);

        let flat = Matrix::from_rows(&vec![vec![1.0 / 3.0; 3]; 3]).unwrap();
        assert_relative_eq!(
            bregman_minc_upper(&flat, &[3, 3, 3]).unwrap(),
            (2.0f64 / 9.0).ln(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn bregman_minc_recovers_zero_one_form() {
        // A 0-1 matrix with row sums r; rows divided by r_i give B.
        let a = [
            [1.0, 1.0, 0.0, 0.0],
            [0.0, 1.0, 1.0, 1.0],
            [1.0, 0.0, 1.0, 0.0],
            [1.0, 1.0, 1.0, 1.0],
        ];
        let r = [2u32, 3, 2, 4];
        let b = Matrix::from_rows(
            &a.iter()
                .zip(&r)
                .map(|(row, &ri)| row.iter().map(|v| v / ri as f64).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let log_rows: f64 = r.iter().map(|&ri| (ri as f64).ln()).sum();
        let bound_a = bregman_minc_upper(&b, &r).unwrap() + log_rows;
        let expected: f64 = r.iter().map(|&ri| ln_factorial(ri as usize) / ri as f64).sum();
        assert_relative_eq!(bound_a, expected, epsilon = 1e-13);
        let per_a = permanent_ryser(&Matrix::from_rows(&a).unwrap()).unwrap();
        assert!(per_a.ln() <= bound_a + 1e-12);
    }

    #[test]
    fn bregman_minc_hypothesis_violations() {
        let b = Matrix::from_rows(&[[0.9, 0.1], [0.5, 0.5]]).unwrap();
        match bregman_minc_upper(&b, &[2, 2]) {
            Err(Error::HypothesisViolated { row, .. }) => assert_eq!(row, 0),
            other => panic!("expected violation, got {other:?}"),
        }
        let b = Matrix::from_rows(&[[0.5, 0.5], [0.5, 0.6]]).unwrap();
        assert!(matches!(
            bregman_minc_upper(&b, &[2, 2]),
            Err(Error::HypothesisViolated { row: 1, .. })
        ));
        assert!(bregman_minc_upper(&b, &[2, 0]).is_err());
    }

    #[test]
    fn sandwich_examples() {
        let flat = Matrix::from_rows(&vec![vec![0.25; 4]; 4]).unwrap();
        let (lo, hi) = permanent_sandwich(&flat, 1.0).unwrap();
        assert_relative_eq!(lo, hi, epsilon = 1e-14);
        assert_relative_eq!(lo, bapat_lower(4), epsilon = 1e-15);

        let b = Matrix::from_rows(&[[2.0 / 3.0, 1.0 / 3.0], [1.0 / 3.0, 2.0 / 3.0]]).unwrap();
        let (lo, hi) = permanent_sandwich(&b, 4.0 / 3.0).unwrap();
        let exact = (5.0f64 / 9.0).ln();
        assert!(lo <= exact && exact <= hi);

        assert!(matches!(
            permanent_sandwich(&b, 1.0),
            Err(Error::HypothesisViolated { .. })
        ));
    }
}
