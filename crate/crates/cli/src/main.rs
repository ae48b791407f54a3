use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use mixdisc::experiment::{self, Suite, SuiteSummary};
use mixdisc::io::{self, Metadata, TupleFile};
use mixdisc::{Error, MatrixTuple, ScalingResult, SolverConfig};

const CSV_HELP: &str = "\
CSV columns (fixed order, header always written):
  suite         suite name
  index         repetition index
  seed          repetition seed (base seed + index)
  n             dimension
  alpha_input   measured conditioning of the generated input
  alpha_scaled  measured conditioning after scaling (empty when unscaled)
  log_exact     log of the checked quantity
  log_lower     log of its lower bound
  log_upper     log of its upper bound
  iterations    scaling iterations (empty when unscaled)
  residual      scaling residual max|tr B_i - 1| (empty when unscaled)
  wall_time_ms  wall time of the repetition
  pass          whether the suite's check held
  note          error text for repetitions that could not be evaluated

Suites:
  lemma22    D(B) of the scaled tuple between D(Q) (traces summing to n) and 1, n in 3..=7
  lemma24    scaled conditioning at most alpha^4, n in 10..=40
  lemma25    D(q_1..q_{n-1}, uu^T) equals D of the restrictions to u-perp, n in 2..=7
  lemma26    restricted trace in [1 - alpha/n, 1 - 1/(alpha n)], n in 10..=40
  thm14      scaled D between n!/n^n and n^(alpha'^4) e^-(n-1), n in 3..=9
  sandwich   exact ln D inside the estimator interval, n in 3..=9
  permanent  Sinkhorn-balanced permanent between van der Waerden and Bregman-Minc, n in 3..=10

MIXDISC_THREADS overrides the worker-pool size.

Exit codes: 0 success, 1 other error, 2 parse error, 3 no convergence, 4 property violation.";

#[derive(Parser)]
#[command(name = "mixdisc", version, about = "Mixed discriminants: exact values, scaling and certified estimates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded random alpha-conditioned tuple.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact mixed discriminant by inclusion-exclusion (n <= 20).
    Exact { input: PathBuf },
    /// Scale a positive definite tuple to doubly stochastic form.
    Scale {
        input: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        /// Write the scaled tuple here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certified log-scale interval for the mixed discriminant.
    Estimate {
        input: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        /// Also compute the exact value and check it lies in the interval.
        #[arg(long)]
        check_exact: bool,
    },
    /// Run a seeded experiment suite and write one CSV row per repetition.
    #[command(after_long_help = CSV_HELP)]
    Experiment {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 20)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SolverArgs {
    /// Trace residual tolerance.
    #[arg(long, default_value_t = SolverConfig::default().trace_tol)]
    tol: f64,
    #[arg(long, default_value_t = SolverConfig::default().max_iterations)]
    max_iter: usize,
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig, Error> {
        let cfg = SolverConfig {
            trace_tol: self.tol,
            max_iterations: self.max_iter,
            ..SolverConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

enum Failure {
    Core(Error),
    Property(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn exit_code(f: &Failure) -> u8 {
    match f {
        Failure::Property(_) => 4,
        Failure::Core(Error::Parse(_) | Error::UnknownSuite(_)) => 2,
        Failure::Core(Error::NoConvergence { .. }) => 3,
        Failure::Core(Error::PropertyViolated(_)) => 4,
        Failure::Core(_) => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Core(Error::NoConvergence { best }) => {
                    println!("{}", pretty(&scaling_json(best)));
                    eprintln!("error: {}", Error::NoConvergence { best: best.clone() });
                }
                Failure::Core(e) => eprintln!("error: {e}"),
                Failure::Property(msg) => eprintln!("property violated: {msg}"),
            }
            ExitCode::from(exit_code(&failure))
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Gen { n, alpha, seed, out } => {
            let t = mixdisc::random_tuple(n, alpha, seed)?;
            let meta = Metadata {
                seed: Some(seed),
                alpha_target: Some(alpha),
                description: Some(format!("random {alpha}-conditioned tuple, n = {n}")),
            };
            let text = TupleFile::from_tuple(&t, meta).to_json()?;
            match out {
                Some(path) => std::fs::write(path, text).map_err(Error::from)?,
                None => print!("{text}"),
            }
        }
        Command::Exact { input } => {
            let t = load(&input)?;
            let v = mixdisc::mixed_discriminant(&t)?;
            if v.overflow_warning {
                eprintln!("warning: |value| exceeds 1e280; rely on log_abs");
            }
            println!(
                "{}",
                pretty(&json!({ "log_abs": v.log_abs, "sign": v.sign, "value": v.value }))
            );
        }
        Command::Scale { input, solver, out } => {
            let t = load(&input)?;
            let result = mixdisc::scale_to_doubly_stochastic(&t, &solver.config()?)?;
            if let Some(path) = out {
                io::save_tuple(
                    path,
                    &result.scaled,
                    Metadata {
                        description: Some(format!("doubly stochastic scaling of {}", input.display())),
                        ..Metadata::default()
                    },
                )?;
            }
            println!("{}", pretty(&scaling_json(&result)));
        }
        Command::Estimate {
            input,
            solver,
            check_exact,
        } => {
            let t = load(&input)?;
            let (est, scaling) = mixdisc::estimate_with_scaling(&t, &solver.config()?)?;
            let mut doc = json!({
                "n": est.n,
                "log_lower": est.log_lower,
                "log_upper": est.log_upper,
                "log_correction": est.log_correction,
                "alpha_input": est.alpha_input,
                "alpha_scaled": est.alpha_scaled,
                "iterations": scaling.iterations,
                "residual": scaling.residual,
                "objective": scaling.objective,
            });
            let mut violation = None;
            if check_exact {
                let exact = mixdisc::mixed_discriminant(&t)?;
                let inside = est.contains(exact.log_abs, 1e-8);
                doc["log_exact"] = json!(exact.log_abs);
                doc["inside"] = json!(inside);
                if !inside {
                    violation = Some(format!(
                        "ln D = {} outside [{}, {}]",
                        exact.log_abs, est.log_lower, est.log_upper
                    ));
                }
            }
            println!("{}", pretty(&doc));
            if let Some(msg) = violation {
                return Err(Failure::Property(msg));
            }
        }
        Command::Experiment { suite, reps, seed, out } => {
            let suite: Suite = suite.parse()?;
            let records = experiment::run_suite(suite, reps, seed, experiment::threads_from_env())?;
            match out {
                Some(path) => {
                    let file = std::fs::File::create(path).map_err(Error::from)?;
                    experiment::write_csv(&records, file)?;
                }
                None => experiment::write_csv(&records, std::io::stdout().lock())?,
            }
            let summary = SuiteSummary::of(&records);
            eprintln!("{suite}: {} passed, {} failed", summary.passed, summary.failed);
            if !summary.all_passed() {
                return Err(Failure::Property(format!("{} of {reps} rows failed", summary.failed)));
            }
        }
    }
    Ok(())
}

fn load(path: &Path) -> Result<MatrixTuple, Error> {
    let loaded = io::load_tuple(path)?;
    if let Some(w) = loaded.symmetry_warning() {
        eprintln!("warning: {w}");
    }
    Ok(loaded.tuple)
}

fn scaling_json(r: &ScalingResult) -> Value {
    json!({
        "xi": r.xi,
        "tau": r.tau,
        "log_det_transform": r.log_det_transform,
        "residual": r.residual,
        "iterations": r.iterations,
        "objective": r.objective,
    })
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values always serialize")
}
