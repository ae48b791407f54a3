//! Exact mixed discriminants and permanents for small `n`.
//!
//! The mixed discriminant is the coefficient of `t_1 ⋯ t_n` in
//! `det(t_1 Q_1 + … + t_n Q_n)`. Because that polynomial has degree `n`, the
//! coefficient is recovered exactly by inclusion–exclusion over subsets:
//!
//! `D(Q_1, …, Q_n) = Σ_{S ⊆ [n]} (−1)^{n−|S|} det(Σ_{i∈S} Q_i)`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ddouble::{lu_determinant_dd, DoubleDouble};
use crate::linalg::Matrix;
use crate::tuples::MatrixTuple;

pub const MIXED_DISCRIMINANT_CAP: usize = 20;
pub const RYSER_CAP: usize = 28;
pub const NAIVE_PERMANENT_CAP: usize = 10;
/// Subset determinants above this magnitude set `ExactValue::overflow_warning`.
pub const OVERFLOW_WARNING: f64 = 1e280;
/// Chunk count for the parallel subset reduction; results are bit-stable for
/// a fixed chunk count.
pub const DEFAULT_CHUNKS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactValue {
    pub value: f64,
    /// `ln |value|`, `-inf` when the value is zero.
    pub log_abs: f64,
    pub sign: i8,
    pub overflow_warning: bool,
}

impl ExactValue {
    pub fn from_value(value: f64) -> Self {
        let sign = if value > 0.0 {
            1
        } else if value < 0.0 {
            -1
        } else {
            0
        };
        Self {
            value,
            log_abs: value.abs().ln(),
            sign,
            overflow_warning: false,
        }
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// All subsets of `{0, …, n−1}` as bitmasks, ordered by size and then
/// lexicographically by their sorted index lists.
pub fn subsets_in_order(n: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(1 << n);
    for k in 0..=n {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            out.push(idx.iter().fold(0u32, |m, &i| m | (1 << i)));
            // Advance to the next k-combination in lexicographic order.
            let mut pos = k;
            while pos > 0 && idx[pos - 1] == n - k + pos - 1 {
                pos -= 1;
            }
            if pos == 0 {
                break;
            }
            idx[pos - 1] += 1;
            for j in pos..k {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    out
}

pub fn mixed_discriminant(t: &MatrixTuple) -> Result<ExactValue> {
    mixed_discriminant_chunked(t, DEFAULT_CHUNKS)
}

/// Inclusion–exclusion evaluation with the subset list split into `chunks`
/// contiguous pieces, each reduced in double-double and then combined in
/// chunk order.
///
/// The alternating sum cancels heavily (at `n = 10` the summands exceed the
/// result by four orders of magnitude), so subset sums, determinants and the
/// reduction all run in double-double arithmetic.
pub fn mixed_discriminant_chunked(t: &MatrixTuple, chunks: usize) -> Result<ExactValue> {
    let n = t.n();
    if n > MIXED_DISCRIMINANT_CAP {
        return Err(Error::DimensionTooLarge {
            n,
            cap: MIXED_DISCRIMINANT_CAP,
        });
    }
    let subsets = subsets_in_order(n);
    let chunk_len = subsets.len().div_ceil(chunks.max(1));

    let partials: Vec<(DoubleDouble, bool)> = subsets
        .par_chunks(chunk_len)
        .map(|chunk| {
            let mut acc = DoubleDouble::ZERO;
            let mut overflow = false;
            let mut buf = vec![DoubleDouble::ZERO; n * n];
            for &mask in chunk {
                let size = mask.count_ones() as usize;
                if size == 0 {
                    // det of the empty sum (the zero matrix) vanishes for n >= 1.
                    continue;
                }
                buf.iter_mut().for_each(|x| *x = DoubleDouble::ZERO);
                for (i, q) in t.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        for (b, &v) in buf.iter_mut().zip(q.as_slice()) {
                            *b = b.add_f64(v);
                        }
                    }
                }
                let det = lu_determinant_dd(buf.clone(), n);
                overflow |= det.hi().abs() > OVERFLOW_WARNING;
                acc = if (n - size) % 2 == 0 { acc + det } else { acc - det };
            }
            (acc, overflow)
        })
        .collect();

    let mut total = DoubleDouble::ZERO;
    let mut overflow_warning = false;
    for (v, o) in partials {
        total = total + v;
        overflow_warning |= o;
    }
    Ok(ExactValue {
        overflow_warning,
        ..ExactValue::from_value(total.to_f64())
    })
}

fn check_square(a: &Matrix, cap: usize) -> Result<usize> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "permanent of a {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    if a.rows() > cap {
        return Err(Error::DimensionTooLarge { n: a.rows(), cap });
    }
    Ok(a.rows())
}

/// Ryser's formula `per A = (−1)^n Σ_S (−1)^{|S|} Π_i Σ_{j∈S} a_ij`, walking
/// column subsets in Gray-code order so each step touches one column.
pub fn permanent_ryser(a: &Matrix) -> Result<f64> {
    let n = check_square(a, RYSER_CAP)?;
    if n == 0 {
        return Ok(1.0);
    }
    let mut row_sums = vec![0.0; n];
    let mut total = CompensatedSum::default();
    let mut gray: u32 = 0;
    for k in 1u32..(1u32 << n) {
        let j = k.trailing_zeros() as usize;
        gray ^= 1 << j;
        let entering = gray & (1 << j) != 0;
        for (i, s) in row_sums.iter_mut().enumerate() {
            if entering {
                *s += a[(i, j)];
            } else {
                *s -= a[(i, j)];
            }
        }
        let prod: f64 = row_sums.iter().product();
        if gray.count_ones() % 2 == 0 {
            total.add(prod);
        } else {
            total.add(-prod);
        }
    }
    let value = total.value();
    Ok(if n % 2 == 0 { value } else { -value })
}

/// Direct sum over all `n!` permutations.
pub fn permanent_naive(a: &Matrix) -> Result<f64> {
    check_square(a, NAIVE_PERMANENT_CAP)?;
    fn walk(a: &Matrix, row: usize, used: u32, prod: f64, acc: &mut CompensatedSum) {
        if row == a.rows() {
            acc.add(prod);
            return;
        }
        for j in 0..a.rows() {
            if used & (1 << j) == 0 {
                walk(a, row + 1, used | (1 << j), prod * a[(row, j)], acc);
            }
        }
    }
    let mut acc = CompensatedSum::default();
    walk(a, 0, 0, 1.0, &mut acc);
    Ok(acc.value())
}
