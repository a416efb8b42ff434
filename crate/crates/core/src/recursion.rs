//! Full colorings by repeated partial coloring of the uncolored set.
//!
//! Round `k` restricts the rows to the `n_k` uncolored coordinates, divides
//! by `sqrt(n_k)` (so `|x_i^(k)|_inf <= 1` gives the sum-of-squares bound),
//! and colors at least `ceil(n_k / 6)` of them. After the planned number of
//! rounds the remainder is finished with a random sign vector, or exactly
//! when at most 16 coordinates are left.

use serde::{Deserialize, Serialize};

use crate::coloring::{merge, support_threshold, Coloring};
use crate::error::{DiscError, Result};
use crate::evaluate::evaluate;
use crate::instance::{Instance, NormModel};
use crate::komlos::{signed_sum, solve_komlos_partial, KomlosInstance};
use crate::rng::derive_seed;
use crate::scalar::Scalar;
use crate::solvers::{solve, solve_exhaustive, solve_random_full, Method, SolveResult, SolverBudget};

/// Remainders this small are finished by exact search.
pub const BASE_CASE_MAX: usize = 16;

/// A failed round is retried on fresh seeds this many times in total.
pub const ROUND_ATTEMPTS: u64 = 3;

/// Constant in the random-tail threshold `C sqrt(n_s ln n)`.
pub const HOEFFDING_CONSTANT: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FinalMethod {
    Random,
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    /// `n_k`, the number of uncolored coordinates entering the round.
    pub active: usize,
    pub method: Method,
    /// Coordinates colored by this round.
    pub colored: usize,
    /// Discrepancy of this round's patch on the original (unnormalized) rows.
    pub max_abs: f64,
    /// Running sum of `max_abs`; bounds the total by the triangle inequality.
    pub cumulative: f64,
    /// Seeds tried, including the successful one.
    pub attempts: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecursionTrace {
    pub n: usize,
    pub s_planned: usize,
    pub rounds: Vec<RoundRecord>,
    /// How the remainder was finished; `None` if the partial rounds colored everything.
    pub final_method: Option<FinalMethod>,
    pub final_max_abs: f64,
    pub final_zeros: usize,
}

impl RecursionTrace {
    fn new(n: usize, s_planned: usize) -> Self {
        RecursionTrace {
            n,
            s_planned,
            rounds: Vec::new(),
            final_method: None,
            final_max_abs: 0.0,
            final_zeros: n,
        }
    }

    pub fn cumulative(&self) -> f64 {
        self.rounds.last().map_or(0.0, |r| r.cumulative)
    }

    fn push(&mut self, active: usize, result: &SolveResult, max_abs: f64, attempts: u64) {
        let cumulative = self.cumulative() + max_abs;
        self.rounds.push(RoundRecord {
            round: self.rounds.len(),
            active,
            method: result.method,
            colored: result.coloring.support(),
            max_abs,
            cumulative,
            attempts,
        });
    }
}

/// `s = ceil(ln ln n / ln(6/5))`, so that `n (5/6)^s <= n / ln n`.
pub fn plan_rounds(n: usize) -> Result<usize> {
    if n < 3 {
        return Err(DiscError::InvalidParameter(format!(
            "round planning needs n >= 3 (got {n}); solve the base case directly"
        )));
    }
    let nf = n as f64;
    Ok((nf.ln().ln() / (6.0f64 / 5.0).ln()).ceil() as usize)
}

/// Run `attempt` on derived seeds until it succeeds or the retries run out.
fn with_retries(
    budget: &SolverBudget,
    round: usize,
    mut attempt: impl FnMut(&SolverBudget) -> Result<SolveResult>,
) -> Result<(SolveResult, u64)> {
    let mut last_err = None;
    for a in 0..ROUND_ATTEMPTS {
        let b = budget.with_seed(derive_seed(budget.seed, &[round as u64, a]));
        match attempt(&b) {
            Ok(r) => return Ok((r, a + 1)),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.expect("at least one attempt"))
}

fn round_failed(round: usize, source: DiscError, trace: &RecursionTrace) -> DiscError {
    DiscError::RoundFailed {
        round,
        source: Box::new(source),
        trace: Box::new(trace.clone()),
    }
}

/// Full `+-1` coloring of a box-bounded instance (`|x_i|_inf <= 1`).
pub fn full_coloring<T: Scalar>(instance: &Instance<T>, budget: &SolverBudget) -> Result<(Coloring, RecursionTrace)> {
    instance.check_model(NormModel::BoxInf)?;
    let n = instance.n();
    let s_planned = if n >= 3 { plan_rounds(n)? } else { 0 };
    let mut trace = RecursionTrace::new(n, s_planned);
    let mut coloring = Coloring::zeros(n);
    let mut active: Vec<usize> = (0..n).collect();

    while !active.is_empty() && active.len() > BASE_CASE_MAX && trace.rounds.len() < s_planned {
        let round = trace.rounds.len();
        let n_k = active.len();
        let restricted = instance.restrict(&active)?;
        let normalized = restricted
            .scaled(1.0 / (n_k as f64).sqrt(), NormModel::KashinSumSq)
            .map_err(|e| round_failed(round, e, &trace))?;
        let min_support = support_threshold(n_k);
        let (result, attempts) = with_retries(budget, round, |b| solve(&normalized, min_support, b))
            .map_err(|e| round_failed(round, e, &trace))?;
        let max_abs = evaluate(&restricted, &result.coloring)?.max_abs;
        coloring = merge(&coloring, &result.coloring, &active)?;
        trace.push(n_k, &result, max_abs, attempts);
        active = coloring.zero_set();
    }

    if !active.is_empty() {
        let round = trace.rounds.len();
        let n_s = active.len();
        let restricted = instance.restrict(&active)?;
        let (result, attempts, method) = if n_s <= BASE_CASE_MAX {
            let r = solve_exhaustive(&restricted, n_s).map_err(|e| round_failed(round, e, &trace))?;
            (r, 1, FinalMethod::Exhaustive)
        } else {
            let threshold = HOEFFDING_CONSTANT * (n_s as f64 * (n as f64).ln()).sqrt();
            let (r, a) = with_retries(budget, round, |b| solve_random_full(&restricted, threshold, b))
                .map_err(|e| round_failed(round, e, &trace))?;
            (r, a, FinalMethod::Random)
        };
        let max_abs = result.report.max_abs;
        coloring = merge(&coloring, &result.coloring, &active)?;
        trace.push(n_s, &result, max_abs, attempts);
        trace.final_method = Some(method);
    }

    trace.final_max_abs = evaluate(instance, &coloring)?.max_abs;
    trace.final_zeros = coloring.zero_count();
    Ok((coloring, trace))
}

/// `s` rounds of Komlós partial coloring on the uncolored columns, with no
/// random tail. Leaves at most `n (5/6)^s` zeros; each round adds at most
/// the per-round constant to the discrepancy.
pub fn iterate_partial<T: Scalar>(
    kom: &KomlosInstance<T>,
    s: usize,
    budget: &SolverBudget,
) -> Result<(Coloring, RecursionTrace)> {
    if s == 0 {
        return Err(DiscError::InvalidParameter("iterate_partial needs s >= 1".into()));
    }
    let n = kom.n();
    let mut trace = RecursionTrace::new(n, s);
    let mut coloring = Coloring::zeros(n);
    let mut active: Vec<usize> = (0..n).collect();
    while !active.is_empty() && trace.rounds.len() < s {
        let round = trace.rounds.len();
        let sub = kom.restrict(&active)?;
        let (result, attempts) = with_retries(budget, round, |b| solve_komlos_partial(&sub, b))
            .map_err(|e| round_failed(round, e, &trace))?;
        let max_abs = result.report.max_abs;
        coloring = merge(&coloring, &result.coloring, &active)?;
        trace.push(active.len(), &result, max_abs, attempts);
        active = coloring.zero_set();
    }
    let total = signed_sum(kom, &coloring)?;
    trace.final_max_abs = total.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    trace.final_zeros = coloring.zero_count();
    Ok((coloring, trace))
}
