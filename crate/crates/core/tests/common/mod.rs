#![allow(dead_code)]

use mixdisc::tuples::{from_spectrum, random_orthogonal};
use mixdisc::{Matrix, MatrixTuple, SymMatrix};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

pub fn random_symmetric<R: Rng>(n: usize, rng: &mut R) -> SymMatrix {
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let v = rng.random_range(-1.0..1.0);
            rows[i][j] = v;
            rows[j][i] = v;
        }
    }
    SymMatrix::from_rows(&rows).unwrap()
}

/// Random frame, eigenvalues uniform in `[lo, hi]`.
pub fn random_pd<R: Rng>(n: usize, lo: f64, hi: f64, rng: &mut R) -> SymMatrix {
    let frame = random_orthogonal(n, rng);
    let eigs: Vec<f64> = (0..n).map(|_| rng.random_range(lo..=hi)).collect();
    from_spectrum(&frame, &eigs)
}

pub fn random_pd_tuple<R: Rng>(n: usize, rng: &mut R) -> MatrixTuple {
    MatrixTuple::new((0..n).map(|_| random_pd(n, 0.2, 3.0, rng)).collect()).unwrap()
}

pub fn random_matrix<R: Rng>(rows: usize, cols: usize, lo: f64, hi: f64, rng: &mut R) -> Matrix {
    Matrix::new(rows, cols, (0..rows * cols).map(|_| rng.random_range(lo..hi)).collect()).unwrap()
}

/// Identity plus a bounded perturbation, so the determinant stays away from 0.
pub fn random_invertible<R: Rng>(n: usize, rng: &mut R) -> Matrix {
    let mut m = random_matrix(n, n, -0.4, 0.4, rng);
    for i in 0..n {
        m[(i, i)] += 1.0;
    }
    m
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for k in 0..used.len() {
            if !used[k] {
                used[k] = true;
                prefix.push(k);
                go(prefix, used, out);
                prefix.pop();
                used[k] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

pub fn sign_of(p: &[usize]) -> f64 {
    let mut inversions = 0;
    for i in 0..p.len() {
        for j in (i + 1)..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Coefficient of `t_1⋯t_n` in `det(Σ t_k Q_k)` read off the Leibniz
/// expansion: each row `i` takes its entry from a distinct matrix `π(i)`.
pub fn mixed_discriminant_leibniz(t: &MatrixTuple) -> f64 {
    let n = t.n();
    let perms = permutations(n);
    let mut total = 0.0;
    for sigma in &perms {
        let s = sign_of(sigma);
        for pi in &perms {
            let mut prod = s;
            for i in 0..n {
                prod *= t[pi[i]][(i, sigma[i])];
            }
            total += prod;
        }
    }
    total
}

pub fn permanent_by_definition(a: &Matrix) -> f64 {
    permutations(a.rows())
        .iter()
        .map(|p| p.iter().enumerate().map(|(i, &j)| a[(i, j)]).product::<f64>())
        .sum()
}

pub fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// Random convex combination of permutation matrices.
pub fn random_birkhoff<R: Rng>(n: usize, terms: usize, rng: &mut R) -> Matrix {
    let weights: Vec<f64> = (0..terms).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut m = Matrix::zeros(n, n);
    let mut perm: Vec<usize> = (0..n).collect();
    for w in weights {
        perm.shuffle(rng);
        for (i, &j) in perm.iter().enumerate() {
            m[(i, j)] += w / total;
        }
    }
    m
}

/// Row-stochastic matrix whose row `i` has entries at most `1/r[i]`: each row
/// is a convex combination of vectors equal to `1/r` on `r` random columns.
pub fn random_capped_stochastic<R: Rng>(n: usize, r: &[u32], rng: &mut R) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    let mut cols: Vec<usize> = (0..n).collect();
    for i in 0..n {
        let ri = r[i] as usize;
        let weights: Vec<f64> = (0..3).map(|_| rng.random_range(0.1..1.0)).collect();
        let total: f64 = weights.iter().sum();
        for w in weights {
            cols.shuffle(rng);
            for &j in &cols[..ri] {
                m[(i, j)] += w / total / ri as f64;
            }
        }
    }
    m
}
