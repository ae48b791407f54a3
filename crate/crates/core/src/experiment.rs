//! Seeded experiment suites that check the inequalities and identities behind
//! the estimator on random instances, one CSV row per repetition.
//!
//! CSV columns, in order:
//!
//! | column         | meaning                                                   |
//! |----------------|-----------------------------------------------------------|
//! | `suite`        | suite name                                                |
//! | `index`        | repetition index                                          |
//! | `seed`         | repetition seed (`base seed + index`)                     |
//! | `n`            | dimension                                                 |
//! | `alpha_input`  | measured conditioning of the generated input              |
//! | `alpha_scaled` | measured conditioning after scaling (when scaled)         |
//! | `log_exact`    | log of the checked quantity                               |
//! | `log_lower`    | log of its lower bound                                    |
//! | `log_upper`    | log of its upper bound                                    |
//! | `iterations`   | scaling iterations (when scaled)                          |
//! | `residual`     | scaling residual `max |tr B_i − 1|` (when scaled)          |
//! | `wall_time_ms` | wall time of the repetition                               |
//! | `pass`         | whether the suite's check held                            |
//! | `note`         | error message for repetitions that could not be evaluated |
//!
//! What the log columns hold per suite:
//!
//! * `lemma22`: `ln D(B)` between `ln D(Q)` (traces of `Q` summing to `n`) and `0`.
//! * `lemma24`: `ln α_scaled` between `0` and `4 ln α_input`; tolerance relative `1e-6`.
//! * `lemma25`: `ln D(q_1, …, q_{n−1}, uuᵀ)` against `ln D` of the restrictions
//!   onto `u^⊥` (both bounds); tolerance relative `1e-8`.
//! * `lemma26`: `ln tr q̂` between `ln(1 − α/n)` and `ln(1 − 1/(αn))` for a
//!   trace-one form; absolute slack `1e-10` on the traces.
//! * `thm14`: `ln D(B)` for the scaled tuple between `ln(n!/n^n)` and
//!   `α′⁴ ln n − (n − 1)`, `α′` the scaled conditioning; relative `1e-8`.
//! * `sandwich`: `ln D(Q)` between the estimator's bounds; slack `1e-8`.
//! * `permanent`: `ln per B` for a Sinkhorn-balanced matrix between the van der
//!   Waerden and Bregman–Minc bounds; relative `1e-10`.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimator::{bapat_lower, conditioned_exponent, estimate_with_scaling, permanent_sandwich};
use crate::exact::{mixed_discriminant, permanent_ryser};
use crate::linalg::{eigen_decompose, orthogonal_complement, restrict_form, Matrix, SymMatrix};
use crate::scaling::{hyperplane_trace_bounds, scale_to_doubly_stochastic, sinkhorn_balance, SolverConfig};
use crate::tuples::{alpha_of, random_conditioned_matrix, random_tuple, random_unit_vector, MatrixTuple};

/// Environment variable overriding the worker-pool size.
pub const THREADS_ENV: &str = "MIXDISC_THREADS";

pub const CSV_COLUMNS: [&str; 14] = [
    "suite",
    "index",
    "seed",
    "n",
    "alpha_input",
    "alpha_scaled",
    "log_exact",
    "log_lower",
    "log_upper",
    "iterations",
    "residual",
    "wall_time_ms",
    "pass",
    "note",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    ScalingGain,
    ScaledConditioning,
    RankOneReduction,
    RestrictedTrace,
    ConditionedUpper,
    Sandwich,
    Permanent,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::ScalingGain,
        Suite::ScaledConditioning,
        Suite::RankOneReduction,
        Suite::RestrictedTrace,
        Suite::ConditionedUpper,
        Suite::Sandwich,
        Suite::Permanent,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::ScalingGain => "lemma22",
            Suite::ScaledConditioning => "lemma24",
            Suite::RankOneReduction => "lemma25",
            Suite::RestrictedTrace => "lemma26",
            Suite::ConditionedUpper => "thm14",
            Suite::Sandwich => "sandwich",
            Suite::Permanent => "permanent",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRecord {
    pub suite: &'static str,
    pub index: usize,
    pub seed: u64,
    pub n: usize,
    pub alpha_input: f64,
    pub alpha_scaled: Option<f64>,
    pub log_exact: Option<f64>,
    pub log_lower: f64,
    pub log_upper: f64,
    pub iterations: Option<usize>,
    pub residual: Option<f64>,
    pub wall_time_ms: f64,
    pub pass: bool,
    pub note: String,
}

impl ExperimentRecord {
    fn new(suite: Suite, index: usize, seed: u64, n: usize) -> Self {
        Self {
            suite: suite.name(),
            index,
            seed,
            n,
            alpha_input: f64::NAN,
            alpha_scaled: None,
            log_exact: None,
            log_lower: f64::NAN,
            log_upper: f64::NAN,
            iterations: None,
            residual: None,
            wall_time_ms: 0.0,
            pass: false,
            note: String::new(),
        }
    }

    /// `log_lower − slack ≤ log_exact ≤ log_upper + slack`.
    pub fn within_bounds(&self, slack: f64) -> bool {
        match self.log_exact {
            Some(v) => self.log_lower - slack <= v && v <= self.log_upper + slack,
            None => self.log_lower <= self.log_upper,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteSummary {
    pub passed: usize,
    pub failed: usize,
}

impl SuiteSummary {
    pub fn of(records: &[ExperimentRecord]) -> Self {
        let passed = records.iter().filter(|r| r.pass).count();
        Self {
            passed,
            failed: records.len() - passed,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

/// Worker count from `MIXDISC_THREADS`, falling back to the number of
/// logical processors.
pub fn threads_from_env() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Runs `reps` repetitions on a pool of `threads` workers. Rows come back in
/// index order.
pub fn run_suite(suite: Suite, reps: usize, seed: u64, threads: usize) -> Result<Vec<ExperimentRecord>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(pool.install(|| {
        (0..reps)
            .into_par_iter()
            .map(|index| run_repetition(suite, index, seed.wrapping_add(index as u64)))
            .collect()
    }))
}

pub fn write_csv<W: Write>(records: &[ExperimentRecord], out: W) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    let to_err = |e: csv::Error| Error::Io(std::io::Error::other(e.to_string()));
    writer.write_record(CSV_COLUMNS).map_err(to_err)?;
    for r in records {
        writer.serialize(r).map_err(to_err)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn run_repetition(suite: Suite, index: usize, seed: u64) -> ExperimentRecord {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = Instant::now();
    let n = match suite {
        Suite::ScalingGain => rng.random_range(3..=7),
        Suite::RankOneReduction => rng.random_range(2..=7),
        Suite::ConditionedUpper | Suite::Sandwich => rng.random_range(3..=9),
        Suite::Permanent => rng.random_range(3..=10),
        Suite::ScaledConditioning | Suite::RestrictedTrace => rng.random_range(10..=40),
    };
    let mut record = ExperimentRecord::new(suite, index, seed, n);
    let outcome = match suite {
        Suite::ScalingGain => scaling_gain(&mut record, &mut rng),
        Suite::ScaledConditioning => scaled_conditioning(&mut record, &mut rng),
        Suite::RankOneReduction => rank_one_reduction(&mut record, &mut rng),
        Suite::RestrictedTrace => restricted_trace(&mut record, &mut rng),
        Suite::ConditionedUpper => conditioned_upper_bound(&mut record, &mut rng),
        Suite::Sandwich => sandwich(&mut record, &mut rng),
        Suite::Permanent => permanent(&mut record, &mut rng),
    };
    if let Err(e) = outcome {
        record.pass = false;
        record.note = e.to_string();
    }
    record.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    record
}

fn scaled_tuple(record: &mut ExperimentRecord, t: &MatrixTuple) -> Result<MatrixTuple> {
    let scaling = scale_to_doubly_stochastic(t, &SolverConfig::default())?;
    record.iterations = Some(scaling.iterations);
    record.residual = Some(scaling.residual);
    record.alpha_scaled = Some(alpha_of(&scaling.scaled)?.alpha);
    Ok(scaling.scaled)
}

fn scaling_gain(record: &mut ExperimentRecord, rng: &mut ChaCha8Rng) -> Result<()> {
    let alpha = rng.random_range(1.0..=3.0);
    let t = random_tuple(record.n, alpha, rng.next_u64())?.trace_normalized()?;
    record.alpha_input = alpha_of(&t)?.alpha;
    let before = mixed_discriminant(&t)?;
    let after = mixed_discriminant(&scaled_tuple(record, &t)?)?;
    record.log_lower = before.log_abs;
    record.log_exact = Some(after.log_abs);
    record.log_upper = 0.0;
    record.pass = after.value >= before.value * (1.0 - 1e-8) && after.value <= 1.0 + 1e-8;
    Ok(())
}

fn scaled_conditioning(record: &mut ExperimentRecord, rng: &mut ChaCha8Rng) -> Result<()> {
    let alpha = [1.0, 1.5, 2.0, 3.0][rng.random_range(0..4)];
    let t = random_tuple(record.n, alpha, rng.next_u64())?;
    let alpha_in = alpha_of(&t)?.alpha;
    record.alpha_input = alpha_in;
    scaled_tuple(record, &t)?;
    let alpha_out = record.alpha_scaled.unwrap_or(f64::INFINITY);
    record.log_exact = Some(alpha_out.ln());
    record.log_lower = 0.0;
    record.log_upper = 4.0 * alpha_in.ln();
    record.pass = alpha_out <= alpha_in.powi(4) * (1.0 + 1e-6);
    Ok(())
}

fn rank_one_reduction(record: &mut ExperimentRecord, rng: &mut ChaCha8Rng) -> Result<()> {
    let n = record.n;
    let alpha = rng.random_range(1.0..=3.0);
    let t = random_tuple(n, alpha, rng.next_u64())?;
    record.alpha_input = alpha_of(&t)?.alpha;
    let u = random_unit_vector(n, rng);
    let full = t.with_slot(n - 1, SymMatrix::outer(&u))?;
    let restricted = crate::tuples::restrict_tuple(&t, &u)?;
    let d_full = mixed_discriminant(&full)?;
    let d_restricted = mixed_discriminant(&restricted)?;
    record.log_exact = Some(d_full.log_abs);
    record.log_lower = d_restricted.log_abs;
    record.log_upper = d_restricted.log_abs;
    record.pass = (d_full.value - d_restricted.value).abs() <= 1e-8 * d_restricted.value.abs();
    Ok(())
}

fn restricted_trace(record: &mut ExperimentRecord, rng: &mut ChaCha8Rng) -> Result<()> {
    let n = record.n;
    let target = rng.random_range(1.0..=4.0);
    let q = random_conditioned_matrix(n, target, rng);
    let q = q.scaled(1.0 / q.trace());
    let eig = eigen_decompose(&q)?;
    let alpha = eig.max() / eig.min();
    record.alpha_input = alpha;
    let u = random_unit_vector(n, rng);
    let restricted = restrict_form(&q, &orthogonal_complement(&u)?)?;
    let trace = restricted.trace();
    let (lo, hi) = hyperplane_trace_bounds(n, alpha);
    record.log_exact = Some(trace.ln());
    record.log_lower = lo.ln();
    record.log_upper = hi.ln();
    record.pass = lo - 1e-10 <= trace && trace <= hi + 1e-10;
    Ok(())
}

fn conditioned_upper_bound(record: &mut ExperimentRecord, rng: &mut ChaCha8Rng) -> Result<()> {
    let alpha = rng.random_range(1.0..=1.5);
    let t = random_tuple(record.n, alpha, rng.next_u64())?;
    record.alpha_input = alpha_of(&t)?.alpha;
    let b = scaled_tuple(record, &t)?;
    let alpha_scaled = record.alpha_scaled.unwrap_or(f64::INFINITY);
    let d = mixed_discriminant(&b)?;
    record.log_exact = Some(d.log_abs);
    record.log_lower = bapat_lower(record.n);
    record.log_upper = conditioned_exponent(record.n, alpha_scaled);
    record.pass = record.within_bounds(1e-8);
    Ok(())
}

fn sandwich(record: &mut ExperimentRecord, rng: &mut ChaCha8Rng) -> Result<()> {
    let alpha = rng.random_range(1.0..=2.0);
    let t = random_tuple(record.n, alpha, rng.next_u64())?;
    let (estimate, scaling) = estimate_with_scaling(&t, &SolverConfig::default())?;
    record.alpha_input = estimate.alpha_input;
    record.alpha_scaled = Some(estimate.alpha_scaled);
    record.iterations = Some(scaling.iterations);
    record.residual = Some(scaling.residual);
    record.log_exact = Some(mixed_discriminant(&t)?.log_abs);
    record.log_lower = estimate.log_lower;
    record.log_upper = estimate.log_upper;
    record.pass = record.within_bounds(1e-8);
    Ok(())
}

fn permanent(record: &mut ExperimentRecord, rng: &mut ChaCha8Rng) -> Result<()> {
    let n = record.n;
    let spread = rng.random_range(1.0..=4.0);
    let raw: Vec<f64> = (0..n * n).map(|_| rng.random_range(1.0..=spread)).collect();
    let b = sinkhorn_balance(&Matrix::new(n, n, raw)?, 1e-14, 10_000)?;
    let alpha = (n as f64 * b.max_abs()).max(1.0);
    record.alpha_input = alpha;
    let (lo, hi) = permanent_sandwich(&b, alpha)?;
    let per = permanent_ryser(&b)?;
    record.log_exact = Some(per.ln());
    record.log_lower = lo;
    record.log_upper = hi;
    record.pass = record.within_bounds(1e-10);
    Ok(())
}
