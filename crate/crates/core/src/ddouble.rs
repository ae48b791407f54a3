//! Minimal double-double arithmetic (an unevaluated sum `hi + lo` carrying
//! about 106 bits of significand), enough for LU determinants.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct DoubleDouble {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub(crate) const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub(crate) const ONE: Self = Self { hi: 1.0, lo: 0.0 };

    pub(crate) fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    pub(crate) fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub(crate) fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub(crate) fn hi(self) -> f64 {
        self.hi
    }

    pub(crate) fn add_f64(self, b: f64) -> Self {
        let (s, e) = two_sum(self.hi, b);
        let (hi, lo) = quick_two_sum(s, e + self.lo);
        Self { hi, lo }
    }
}

impl Add for DoubleDouble {
    type Output = Self;

    fn add(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Self { hi, lo }
    }
}

impl Neg for DoubleDouble {
    type Output = Self;

    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;

    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;

    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;

    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b * Self::from_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b * Self::from_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo }.add_f64(q3)
    }
}

/// Determinant of an `n x n` row-major buffer by partially pivoted LU.
pub(crate) fn lu_determinant_dd(mut a: Vec<DoubleDouble>, n: usize) -> DoubleDouble {
    let mut det = DoubleDouble::ONE;
    for k in 0..n {
        let mut p = k;
        let mut best = a[k * n + k].abs().hi();
        for i in (k + 1)..n {
            let v = a[i * n + k].abs().hi();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == 0.0 {
            return DoubleDouble::ZERO;
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            det = -det;
        }
        let pivot = a[k * n + k];
        det = det * pivot;
        for i in (k + 1)..n {
            let factor = a[i * n + k] / pivot;
            if factor.hi() == 0.0 {
                continue;
            }
            for j in (k + 1)..n {
                a[i * n + j] = a[i * n + j] - factor * a[k * n + j];
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn captures_bits_below_double_precision() {
        let tiny = 2f64.powi(-80);
        let x = DoubleDouble::ONE.add_f64(tiny) - DoubleDouble::ONE;
        assert_eq!(x.to_f64(), tiny);
    }

    #[test]
    fn division_round_trips() {
        let third = DoubleDouble::ONE / DoubleDouble::from_f64(3.0);
        let back = third * DoubleDouble::from_f64(3.0) - DoubleDouble::ONE;
        assert!(back.to_f64().abs() < 1e-30);
    }

    #[test]
    fn determinant_matches_exact_integer_case() {
        let a: Vec<DoubleDouble> = [0.0, 2.0, 1.0, 3.0, 1.0, 4.0, 5.0, 6.0, 0.0]
            .iter()
            .map(|&v| DoubleDouble::from_f64(v))
            .collect();
        // 0·(0−24) − 2·(0−20) + 1·(18−5) = 53.
        assert_eq!(lu_determinant_dd(a, 3).to_f64(), 53.0);
    }
}
