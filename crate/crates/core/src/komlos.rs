//! Komlós setting: `n` column vectors `u_i in R^m` with `|u_i|_2 <= 1`.
//!
//! The transpose reduction turns the columns into the Kashin instance with
//! rows `a_j sqrt(m/n)`, where `a_j = (u_1^(j), ..., u_n^(j))`. Since
//! `sum_j |a_j|^2 = sum_i |u_i|^2 <= n`, the scaled rows satisfy the
//! sum-of-squares hypothesis, and a partial coloring of the reduced
//! instance with discrepancy `c sqrt(m/n)` gives `|sum eps_i u_i|_inf <= c`.

use crate::certificate::CERTIFIED_CONSTANT;
use crate::coloring::{support_threshold, Coloring};
use crate::error::{DiscError, Result};
use crate::evaluate::DiscrepancyReport;
use crate::instance::{validate_active, Instance, NormModel, MODEL_SLACK};
use crate::scalar::{pairwise_sum, sum_of_squares, Scalar};
use crate::solvers::{solve, SolveResult, SolverBudget};

/// Per-round guarantee for the Komlós partial coloring.
pub const KOMLOS_CONSTANT: f64 = CERTIFIED_CONSTANT;

#[derive(Debug, Clone, PartialEq)]
pub struct KomlosInstance<T: Scalar> {
    n: usize,
    m: usize,
    /// Column-major: `u_i` occupies `[i*m, (i+1)*m)`.
    columns: Vec<T>,
}

impl<T: Scalar> KomlosInstance<T> {
    pub fn from_columns(columns: Vec<Vec<T>>) -> Result<Self> {
        let n = columns.len();
        if n == 0 {
            return Err(DiscError::InvalidInstance("at least one column required".into()));
        }
        let m = columns[0].len();
        let mut flat = Vec::with_capacity(n * m);
        for (i, col) in columns.into_iter().enumerate() {
            if col.len() != m {
                return Err(DiscError::InvalidInstance(format!(
                    "column {i} has length {}, expected {m}",
                    col.len()
                )));
            }
            flat.extend(col);
        }
        Self::from_column_major(n, m, flat)
    }

    pub fn from_column_major(n: usize, m: usize, columns: Vec<T>) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(DiscError::InvalidInstance(format!(
                "dimensions must be positive (n = {n}, m = {m})"
            )));
        }
        if columns.len() != n * m {
            return Err(DiscError::DimensionMismatch {
                expected: n * m,
                got: columns.len(),
            });
        }
        let kom = KomlosInstance { n, m, columns };
        for i in 0..n {
            let col = kom.column(i);
            if col.iter().any(|v| !v.is_finite()) {
                return Err(DiscError::InvalidInstance(format!("column {i} has a non-finite entry")));
            }
            let sq = sum_of_squares(col.iter().copied());
            if sq > 1.0 + MODEL_SLACK {
                return Err(DiscError::ModelViolation {
                    model: NormModel::KomlosUnit.name(),
                    detail: format!("column {i} has squared norm {sq} > 1"),
                });
            }
        }
        Ok(kom)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn column(&self, i: usize) -> &[T] {
        &self.columns[i * self.m..(i + 1) * self.m]
    }

    pub fn columns(&self) -> impl ExactSizeIterator<Item = &[T]> + '_ {
        self.columns.chunks_exact(self.m)
    }

    /// The unscaled rows `a_j`, declared under [`NormModel::KomlosUnit`].
    pub fn to_row_layout(&self) -> Instance<T> {
        let mut entries = Vec::with_capacity(self.n * self.m);
        for j in 0..self.m {
            entries.extend((0..self.n).map(|i| self.columns[i * self.m + j]));
        }
        Instance::from_row_major(NormModel::KomlosUnit, self.m, self.n, entries)
            .expect("column norms already validated")
    }

    /// Read the columns back out of a row-layout instance.
    pub fn from_row_layout(rows: &Instance<T>) -> Result<Self> {
        let (m, n) = (rows.m(), rows.n());
        let mut columns = Vec::with_capacity(n * m);
        for i in 0..n {
            columns.extend(rows.column(i));
        }
        Self::from_column_major(n, m, columns)
    }

    /// Keep only the columns in `active` (strictly increasing).
    pub fn restrict(&self, active: &[usize]) -> Result<Self> {
        validate_active(active, self.n)?;
        let mut columns = Vec::with_capacity(active.len() * self.m);
        for &i in active {
            columns.extend_from_slice(self.column(i));
        }
        Self::from_column_major(active.len(), self.m, columns)
    }

    pub fn total_sum_sq(&self) -> f64 {
        sum_of_squares(self.columns.iter().copied())
    }
}

/// Rows `a_j sqrt(m/n)` as a Kashin instance.
pub fn transpose_reduce<T: Scalar>(kom: &KomlosInstance<T>) -> Instance<T> {
    let scale = (kom.m as f64 / kom.n as f64).sqrt();
    let mut entries = Vec::with_capacity(kom.n * kom.m);
    for j in 0..kom.m {
        entries.extend((0..kom.n).map(|i| T::narrow(kom.columns[i * kom.m + j].wide() * scale)));
    }
    Instance::from_row_major(NormModel::KashinSumSq, kom.m, kom.n, entries)
        .expect("sum_j |a_j sqrt(m/n)|^2 = (m/n) sum_i |u_i|^2 <= m")
}

/// `sum_i eps_i u_i`, each coordinate pairwise-summed.
pub fn signed_sum<T: Scalar>(kom: &KomlosInstance<T>, coloring: &Coloring) -> Result<Vec<f64>> {
    if coloring.len() != kom.n {
        return Err(DiscError::DimensionMismatch {
            expected: kom.n,
            got: coloring.len(),
        });
    }
    let mut terms = vec![0.0; kom.n];
    Ok((0..kom.m)
        .map(|j| {
            for (i, t) in terms.iter_mut().enumerate() {
                *t = f64::from(coloring.values()[i]) * kom.columns[i * kom.m + j].wide();
            }
            pairwise_sum(&terms)
        })
        .collect())
}

/// Solve on the reduced instance with the given support floor; the returned
/// report holds the signed sum and its sup norm.
pub fn solve_komlos<T: Scalar>(
    kom: &KomlosInstance<T>,
    min_support: usize,
    budget: &SolverBudget,
) -> Result<SolveResult> {
    let reduced = transpose_reduce(kom);
    let result = solve(&reduced, min_support, budget)?;
    let sum = signed_sum(kom, &result.coloring)?;
    Ok(SolveResult {
        report: DiscrepancyReport::from_inner_products(sum, &result.coloring),
        ..result
    })
}

/// Partial coloring with support at least `ceil(n/6)`; certified `|sum eps_i u_i|_inf <= 14`.
pub fn solve_komlos_partial<T: Scalar>(kom: &KomlosInstance<T>, budget: &SolverBudget) -> Result<SolveResult> {
    solve_komlos(kom, support_threshold(kom.n), budget)
}
