//! Uniformly random full colorings with a discrepancy threshold.

use rand::Rng;

use super::{Method, SolveResult, SolverBudget};
use crate::coloring::Coloring;
use crate::error::{DiscError, Result};
use crate::evaluate::evaluate;
use crate::instance::Instance;
use crate::rng::stream_rng;
use crate::scalar::Scalar;

/// `ceil(100 ln(n + 1))` attempts.
pub fn default_retry_cap(n: usize) -> usize {
    (100.0 * ((n + 1) as f64).ln()).ceil() as usize
}

/// Draw `eps` uniform in `{-1, 1}^n` until `max_abs <= threshold`.
pub fn solve_random_full<T: Scalar>(
    instance: &Instance<T>,
    threshold: f64,
    budget: &SolverBudget,
) -> Result<SolveResult> {
    if threshold.is_nan() || threshold <= 0.0 {
        return Err(DiscError::InvalidParameter(format!(
            "threshold must be positive, got {threshold}"
        )));
    }
    let n = instance.n();
    let cap = budget.retry_cap.unwrap_or_else(|| default_retry_cap(n)).max(1);
    let mut rng = stream_rng(budget.seed, 0);
    let mut best: Option<(Coloring, f64)> = None;
    for attempt in 1..=cap {
        let values: Vec<i8> = (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
        let coloring = Coloring::from_trusted(values);
        let report = evaluate(instance, &coloring)?;
        if report.max_abs <= threshold {
            return Ok(SolveResult {
                coloring,
                report,
                method: Method::Random,
                optimal: false,
                attempts: attempt,
            });
        }
        if best.as_ref().is_none_or(|(_, b)| report.max_abs < *b) {
            best = Some((coloring, report.max_abs));
        }
    }
    let (coloring, best_max_abs) = best.expect("at least one attempt");
    Err(DiscError::RetryExhausted {
        threshold,
        attempts: cap,
        best_max_abs,
        best: Box::new(coloring),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::NormModel;

    #[test]
    fn zero_and_identity_succeed_first_try() {
        let b = SolverBudget::default().with_seed(3);
        let z = Instance::<f64>::zeros(NormModel::BoxInf, 4, 5).unwrap();
        let r = solve_random_full(&z, 0.1, &b).unwrap();
        assert_eq!(r.attempts, 1);
        assert!(r.coloring.is_full());

        let rows = (0..4)
            .map(|i| (0..4).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let id = Instance::from_rows(NormModel::BoxInf, rows).unwrap();
        let r = solve_random_full(&id, 1.0, &b).unwrap();
        assert_eq!((r.attempts, r.report.max_abs), (1, 1.0));
    }

    #[test]
    fn exhausted_retries_report_best() {
        let a = Instance::from_rows(NormModel::BoxInf, vec![vec![1.0]]).unwrap();
        let b = SolverBudget {
            retry_cap: Some(5),
            ..SolverBudget::default()
        };
        match solve_random_full(&a, 0.5, &b) {
            Err(DiscError::RetryExhausted {
                attempts, best_max_abs, ..
            }) => {
                assert_eq!(attempts, 5);
                assert_eq!(best_max_abs, 1.0);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(solve_random_full(&a, 0.0, &b).is_err());
    }

    #[test]
    fn default_cap() {
        assert_eq!(default_retry_cap(1), 70);
        assert_eq!(default_retry_cap(99), 461);
    }
}
