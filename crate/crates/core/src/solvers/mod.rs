//! Partial-coloring solvers over `{-1, 0, 1}^n`.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::coloring::Coloring;
use crate::error::Result;
use crate::evaluate::DiscrepancyReport;
use crate::instance::Instance;
use crate::scalar::Scalar;

mod anneal;
mod exhaustive;
mod gray;
mod random;

pub use anneal::solve_anneal;
pub use exhaustive::{solve_exhaustive, EXHAUSTIVE_MAX_N};
pub use random::{default_retry_cap, solve_random_full};

/// Search limits and the seed that fixes all stochastic behaviour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverBudget {
    /// `solve` enumerates exhaustively when `3^n` is at most this.
    pub max_candidates: u64,
    pub anneal_steps: u64,
    pub restarts: u32,
    /// Random-coloring attempts; `None` means `ceil(100 ln(n + 1))`.
    pub retry_cap: Option<usize>,
    pub seed: u64,
}

impl Default for SolverBudget {
    fn default() -> Self {
        SolverBudget {
            max_candidates: 3u64.pow(12),
            anneal_steps: 100_000,
            restarts: 8,
            retry_cap: None,
            seed: 0,
        }
    }
}

impl SolverBudget {
    pub fn with_seed(self, seed: u64) -> Self {
        SolverBudget { seed, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    Exhaustive,
    Anneal,
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub coloring: Coloring,
    pub report: DiscrepancyReport,
    pub method: Method,
    /// Only an exhaustive search that ran to completion is optimal.
    pub optimal: bool,
    /// Restarts (anneal), attempts (random) or 1 (exhaustive).
    pub attempts: usize,
}

/// Total order on candidate colorings: smaller discrepancy, then larger
/// support, then lexicographically smaller values with `-1 < 0 < 1`.
pub fn tie_break(a: (&Coloring, f64), b: (&Coloring, f64)) -> Ordering {
    a.1.total_cmp(&b.1)
        .then_with(|| b.0.support().cmp(&a.0.support()))
        .then_with(|| a.0.values().cmp(b.0.values()))
}

pub(crate) fn better_of(a: SolveResult, b: SolveResult) -> SolveResult {
    match tie_break((&a.coloring, a.report.max_abs), (&b.coloring, b.report.max_abs)) {
        Ordering::Greater => b,
        _ => a,
    }
}

/// Exhaustive when `n <= 16` and `3^n <= max_candidates`, otherwise annealing.
pub fn solve<T: Scalar>(instance: &Instance<T>, min_support: usize, budget: &SolverBudget) -> Result<SolveResult> {
    let n = instance.n();
    let small = n <= EXHAUSTIVE_MAX_N && 3u64.pow(n as u32) <= budget.max_candidates;
    if small {
        solve_exhaustive(instance, min_support)
    } else {
        solve_anneal(instance, min_support, budget)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::NormModel;

    fn inst(n: usize) -> Instance<f64> {
        Instance::from_row_major(NormModel::BoxInf, 1, n, vec![0.5; n]).unwrap()
    }

    #[test]
    fn dispatch() {
        let b = SolverBudget {
            anneal_steps: 2000,
            restarts: 2,
            ..SolverBudget::default()
        };
        assert_eq!(solve(&inst(3), 1, &b).unwrap().method, Method::Exhaustive);
        assert_eq!(solve(&inst(40), 7, &b).unwrap().method, Method::Anneal);
        let none = SolverBudget { max_candidates: 0, ..b };
        assert_eq!(solve(&inst(3), 1, &none).unwrap().method, Method::Anneal);
    }

    #[test]
    fn tie_break_order() {
        let a = Coloring::new(vec![-1, 1]).unwrap();
        let b = Coloring::new(vec![1, -1]).unwrap();
        let c = Coloring::new(vec![0, 1]).unwrap();
        assert_eq!(tie_break((&a, 0.0), (&b, 0.0)), Ordering::Less);
        assert_eq!(tie_break((&a, 0.0), (&c, 0.0)), Ordering::Less);
        assert_eq!(tie_break((&c, 0.0), (&a, 0.5)), Ordering::Less);
    }
}
