//! `disclab bench`: median discrepancy over seeds, normalized two ways.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, ValueEnum};

use disclab::io::write_atomic;
use disclab::{
    full_coloring, generate, solve, solve_komlos_partial, support_threshold, DiscError, Family, Generated64,
    GeneratorSpec, NormModel,
};

use crate::{bench_seed, BudgetArgs, CmdResult, Failure};

/// Column order is part of the CSV contract.
pub const CSV_HEADER: &str = "n,m,median_max_abs,ratio_sqrt_m_over_n,ratio_sqrt_n_lnln_n";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Full +-1 coloring by recursion (box-model families).
    Full,
    /// One partial coloring with support ceil(n/6).
    Partial,
}

#[derive(Args)]
pub struct BenchArgs {
    #[arg(long)]
    family: Family,
    /// Comma-separated values of n (each >= 3).
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    /// Seeds per size.
    #[arg(long)]
    seeds: usize,
    /// m = ratio * n.
    #[arg(long, default_value_t = 1)]
    m_ratio: usize,
    #[arg(long, value_enum, default_value_t = Mode::Full)]
    mode: Mode,
    #[command(flatten)]
    budget: BudgetArgs,
    #[arg(long)]
    out: PathBuf,
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let k = values.len();
    if k % 2 == 1 {
        values[k / 2]
    } else {
        0.5 * (values[k / 2 - 1] + values[k / 2])
    }
}

fn one_run(args: &BenchArgs, n: usize, m: usize, seed: u64) -> Result<f64, DiscError> {
    let spec = GeneratorSpec {
        family: args.family,
        n,
        m,
        seed,
    };
    let budget = args.budget.budget().with_seed(seed);
    match (generate::<f64>(&spec)?, args.mode) {
        (Generated64::Rows(inst), Mode::Full) => Ok(full_coloring(&inst, &budget)?.1.final_max_abs),
        (Generated64::Rows(inst), Mode::Partial) => {
            let kashin = if inst.model() == NormModel::KashinSumSq {
                inst
            } else {
                inst.scaled(1.0 / (n as f64).sqrt(), NormModel::KashinSumSq)?
            };
            Ok(solve(&kashin, support_threshold(n), &budget)?.report.max_abs)
        }
        (Generated64::Columns(kom), Mode::Partial) => Ok(solve_komlos_partial(&kom, &budget)?.report.max_abs),
        (Generated64::Columns(_), Mode::Full) => Err(DiscError::InvalidParameter(
            "full mode needs a row-layout family; use --mode partial for Komlós columns".into(),
        )),
    }
}

pub fn run(args: &BenchArgs) -> CmdResult {
    if args.seeds == 0 {
        return Err(Failure::usage("--seeds must be positive"));
    }
    if let Some(&n) = args.sizes.iter().find(|&&n| n < 3) {
        return Err(Failure::usage(&format!("size {n} < 3 (ln ln n undefined)")));
    }
    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    for &n in &args.sizes {
        let m = n * args.m_ratio.max(1);
        let mut values = (0..args.seeds)
            .map(|i| one_run(args, n, m, bench_seed(args.budget.seed, n, i)))
            .collect::<Result<Vec<_>, _>>()?;
        let med = median(&mut values);
        let nf = n as f64;
        let r1 = med / (m as f64 / nf).sqrt();
        let r2 = med / (nf.sqrt() * nf.ln().ln());
        writeln!(csv, "{n},{m},{med},{r1},{r2}").expect("writing to a String");
    }
    write_atomic(&args.out, csv.as_bytes())?;
    Ok(0)
}
