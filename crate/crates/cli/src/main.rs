//! `disclab`: generate instances, solve, certify, recurse and benchmark.
//!
//! Exit codes: 0 success, 1 bound violated, 2 usage or input error,
//! 3 solver failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use disclab::io::{self, instance_hash, komlos_hash};
use disclab::rng::derive_seed;
use disclab::{
    certify, evaluate, full_coloring, generate, iterate_partial, solve, solve_komlos, solve_komlos_partial,
    support_threshold, volume_check, DiscError, Family, Generated64, GeneratorSpec, Instance64, KomlosInstance64,
    NormModel, SolverBudget, CERTIFIED_CONSTANT,
};

mod bench;

const EXIT_VIOLATED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_SOLVER: u8 = 3;

#[derive(Parser)]
#[command(
    name = "disclab",
    version,
    about = "Partial and full colorings for combinatorial discrepancy"
)]
struct Cli {
    /// Worker threads for the parallel solvers (results do not depend on it).
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a seeded instance file.
    Generate(GenerateArgs),
    /// Find a partial coloring of an instance.
    Solve(SolveArgs),
    /// Check a coloring against support and discrepancy thresholds.
    Verify(VerifyArgs),
    /// Build the existence certificate (and optionally a Monte-Carlo volume check).
    Certify(CertifyArgs),
    /// Full +-1 coloring by repeated partial coloring.
    Recurse(RecurseArgs),
    /// Partial (or iterated, or experimental full) coloring of Komlós columns.
    Komlos(KomlosArgs),
    /// Normalized discrepancy table over sizes and seeds, as CSV.
    Bench(bench::BenchArgs),
}

#[derive(Args, Clone)]
pub(crate) struct BudgetArgs {
    /// Seed for every stochastic choice (required).
    #[arg(long)]
    seed: u64,
    /// Exhaustive search when 3^n is at most this.
    #[arg(long, default_value_t = SolverBudget::default().max_candidates)]
    max_candidates: u64,
    #[arg(long, default_value_t = SolverBudget::default().anneal_steps)]
    anneal_steps: u64,
    #[arg(long, default_value_t = SolverBudget::default().restarts)]
    restarts: u32,
    /// Random-coloring attempts (default ceil(100 ln(n+1))).
    #[arg(long)]
    retry_cap: Option<usize>,
}

impl BudgetArgs {
    pub(crate) fn budget(&self) -> SolverBudget {
        SolverBudget {
            max_candidates: self.max_candidates,
            anneal_steps: self.anneal_steps,
            restarts: self.restarts,
            retry_cap: self.retry_cap,
            seed: self.seed,
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    family: Family,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    seed: u64,
    /// Divide box-model rows by sqrt(n) and declare them under the sum-of-squares model.
    #[arg(long)]
    kashin: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Defaults to ceil(n/6).
    #[arg(long)]
    min_support: Option<usize>,
    #[command(flatten)]
    budget: BudgetArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    coloring_out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    coloring: PathBuf,
    /// Largest admissible max |<eps, x_i>|.
    #[arg(long)]
    max_disc: Option<f64>,
    /// Defaults to ceil(n/6).
    #[arg(long)]
    min_support: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value_t = disclab::DEFAULT_DELTA)]
    delta: f64,
    /// Monte-Carlo samples for the volume check.
    #[arg(long, requires = "seed")]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RecurseArgs {
    #[arg(long)]
    instance: PathBuf,
    #[command(flatten)]
    budget: BudgetArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    coloring_out: Option<PathBuf>,
}

#[derive(Args)]
struct KomlosArgs {
    #[arg(long)]
    komlos: PathBuf,
    /// Iterate the partial coloring this many rounds.
    #[arg(long, conflicts_with = "full")]
    iters: Option<usize>,
    /// Experiment: ask for a full coloring (no guarantee exists).
    #[arg(long)]
    full: bool,
    #[command(flatten)]
    budget: BudgetArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A command failure mapped to an exit code.
pub(crate) struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    pub(crate) fn usage(message: &str) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.to_string(),
        }
    }
}

impl From<DiscError> for Failure {
    fn from(e: DiscError) -> Self {
        let code = match e {
            DiscError::TooLarge { .. }
            | DiscError::NoFeasible { .. }
            | DiscError::RetryExhausted { .. }
            | DiscError::RoundFailed { .. } => EXIT_SOLVER,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

pub(crate) type CmdResult = Result<u8, Failure>;

/// Fields that legitimately change between identical runs.
#[derive(Serialize)]
struct Runtime {
    wall_time_secs: f64,
    workers: usize,
}

#[derive(Serialize)]
struct RunReport<'a> {
    command: &'a str,
    params: Value,
    instance_hash: String,
    seed: Option<u64>,
    result: Value,
    runtime: Runtime,
}

pub(crate) fn emit(out: Option<&Path>, value: &Value) -> Result<(), Failure> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(DiscError::from)?;
    bytes.push(b'\n');
    match out {
        Some(p) => io::write_atomic(p, &bytes)?,
        None => print!("{}", String::from_utf8_lossy(&bytes)),
    }
    Ok(())
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn run_report(
    command: &str,
    params: Value,
    instance_hash: String,
    seed: Option<u64>,
    result: Value,
    started: Instant,
) -> Value {
    to_value(&RunReport {
        command,
        params,
        instance_hash,
        seed,
        result,
        runtime: Runtime {
            wall_time_secs: started.elapsed().as_secs_f64(),
            workers: rayon::current_num_threads(),
        },
    })
}

fn budget_params(b: &SolverBudget) -> Value {
    json!({
        "max_candidates": b.max_candidates,
        "anneal_steps": b.anneal_steps,
        "restarts": b.restarts,
        "retry_cap": b.retry_cap,
    })
}

fn cmd_generate(args: &GenerateArgs) -> CmdResult {
    let spec = GeneratorSpec {
        family: args.family,
        n: args.n,
        m: args.m,
        seed: args.seed,
    };
    match generate::<f64>(&spec)? {
        Generated64::Rows(inst) => {
            let inst = if args.kashin && inst.model() == NormModel::BoxInf {
                inst.scaled(1.0 / (inst.n() as f64).sqrt(), NormModel::KashinSumSq)?
            } else {
                inst
            };
            io::write_instance(&args.out, &inst)?;
        }
        Generated64::Columns(kom) => io::write_komlos(&args.out, &kom)?,
    }
    Ok(0)
}

fn cmd_solve(args: &SolveArgs) -> CmdResult {
    let started = Instant::now();
    let inst: Instance64 = io::read_instance(&args.instance)?;
    let min_support = args.min_support.unwrap_or_else(|| support_threshold(inst.n()));
    let budget = args.budget.budget();
    let result = solve(&inst, min_support, &budget)?;
    if let Some(p) = &args.coloring_out {
        io::write_coloring(p, &result.coloring)?;
    }
    let report = run_report(
        "solve",
        json!({"min_support": min_support, "budget": budget_params(&budget)}),
        instance_hash(&inst),
        Some(budget.seed),
        to_value(&result),
        started,
    );
    emit(args.out.as_deref(), &report)?;
    Ok(0)
}

fn cmd_verify(args: &VerifyArgs) -> CmdResult {
    let inst: Instance64 = io::read_instance(&args.instance)?;
    let coloring = io::read_coloring(&args.coloring)?;
    let report = evaluate(&inst, &coloring)?;
    let required = args.min_support.unwrap_or_else(|| support_threshold(inst.n()));
    let mut failures = Vec::new();
    if coloring.support() < required {
        failures.push(format!("support {} < required {required}", coloring.support()));
    }
    if let Some(max) = args.max_disc {
        if report.max_abs > max {
            failures.push(format!("discrepancy {} > allowed {max}", report.max_abs));
        }
    }
    for f in &failures {
        eprintln!("{f}");
    }
    let value = json!({
        "instance_hash": instance_hash(&inst),
        "required_support": required,
        "max_disc": args.max_disc,
        "report": report,
        "verified": failures.is_empty(),
        "failures": failures,
    });
    emit(args.out.as_deref(), &value)?;
    Ok(if failures.is_empty() { 0 } else { EXIT_VIOLATED })
}

fn cmd_certify(args: &CertifyArgs) -> CmdResult {
    let inst: Instance64 = io::read_instance(&args.instance)?;
    let cert = certify(&inst, args.delta)?;
    let volume = match (args.samples, args.seed) {
        (Some(samples), Some(seed)) => Some(volume_check(&inst, cert.lambda, args.delta, samples, seed)?),
        _ => None,
    };
    let ok = cert.verdict && volume.as_ref().is_none_or(|v| !v.violation);
    let value = json!({
        "schema": "disclab-certificate-v1",
        "instance_hash": instance_hash(&inst),
        "provenance": {
            "delta": args.delta,
            "lambda": cert.lambda,
            "lambda_rule": cert.lambda_rule,
            "certified_constant": CERTIFIED_CONSTANT,
        },
        "certificate": cert,
        "volume": volume,
        "seed": args.seed,
    });
    emit(args.out.as_deref(), &value)?;
    Ok(if ok { 0 } else { EXIT_VIOLATED })
}

fn cmd_recurse(args: &RecurseArgs) -> CmdResult {
    let started = Instant::now();
    let inst: Instance64 = io::read_instance(&args.instance)?;
    let budget = args.budget.budget();
    let (coloring, trace) = full_coloring(&inst, &budget)?;
    if let Some(p) = &args.coloring_out {
        io::write_coloring(p, &coloring)?;
    }
    let report = run_report(
        "recurse",
        json!({"budget": budget_params(&budget)}),
        instance_hash(&inst),
        Some(budget.seed),
        json!({"trace": trace, "coloring": coloring, "max_abs": trace.final_max_abs}),
        started,
    );
    emit(args.out.as_deref(), &report)?;
    Ok(0)
}

fn cmd_komlos(args: &KomlosArgs) -> CmdResult {
    let started = Instant::now();
    let kom: KomlosInstance64 = io::read_komlos(&args.komlos)?;
    let budget = args.budget.budget();
    let (params, result) = if let Some(s) = args.iters {
        let (coloring, trace) = iterate_partial(&kom, s, &budget)?;
        (
            json!({"mode": "iterate", "iters": s}),
            json!({
                "coloring": coloring,
                "trace": trace,
                "certified_bound": CERTIFIED_CONSTANT * trace.rounds.len() as f64,
            }),
        )
    } else {
        let (mode, min_support) = if args.full {
            ("full-experiment", kom.n())
        } else {
            ("partial", support_threshold(kom.n()))
        };
        let r = if args.full {
            solve_komlos(&kom, min_support, &budget)?
        } else {
            solve_komlos_partial(&kom, &budget)?
        };
        (
            json!({"mode": mode, "min_support": min_support}),
            json!({
                "certified_k": (!args.full).then_some(CERTIFIED_CONSTANT),
                "empirical_k": r.report.max_abs,
                "solve": r,
            }),
        )
    };
    let mut params = params;
    params["budget"] = budget_params(&budget);
    let report = run_report("komlos", params, komlos_hash(&kom), Some(budget.seed), result, started);
    emit(args.out.as_deref(), &report)?;
    Ok(0)
}

pub(crate) fn bench_seed(base: u64, n: usize, i: usize) -> u64 {
    derive_seed(base, &[n as u64, i as u64])
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(w) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let outcome = match &cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Certify(a) => cmd_certify(a),
        Command::Recurse(a) => cmd_recurse(a),
        Command::Komlos(a) => cmd_komlos(a),
        Command::Bench(a) => bench::run(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
