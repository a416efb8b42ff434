//! Constraint matrices and their norm models.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{DiscError, Result};
use crate::scalar::{sum_of_squares, Scalar};

/// Relative slack granted to every norm-model check.
pub const MODEL_SLACK: f64 = 1e-9;

/// Which norm hypothesis the rows of an [`Instance`] are declared to satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NormModel {
    /// `sum_i |x_i|_2^2 <= m`.
    KashinSumSq,
    /// Rows are the transpose layout of column vectors `u_1..u_n`, each with `|u_i|_2 <= 1`.
    KomlosUnit,
    /// Every entry bounded by 1 in absolute value.
    BoxInf,
}

impl NormModel {
    pub fn name(self) -> &'static str {
        match self {
            NormModel::KashinSumSq => "KashinSumSq",
            NormModel::KomlosUnit => "KomlosUnit",
            NormModel::BoxInf => "BoxInf",
        }
    }
}

impl fmt::Display for NormModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn within(value: f64, bound: f64) -> bool {
    value <= bound * (1.0 + MODEL_SLACK)
}

/// `m` vectors in `R^n`, stored row-major, validated against a [`NormModel`].
#[derive(Debug, Clone, PartialEq)]
pub struct Instance<T: Scalar> {
    n: usize,
    m: usize,
    entries: Vec<T>,
    model: NormModel,
}

impl<T: Scalar> Instance<T> {
    /// Build from explicit rows; every row must have the same length.
    pub fn from_rows(model: NormModel, rows: Vec<Vec<T>>) -> Result<Self> {
        let m = rows.len();
        if m == 0 {
            return Err(DiscError::InvalidInstance("at least one row required".into()));
        }
        let n = rows[0].len();
        let mut entries = Vec::with_capacity(m * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(DiscError::InvalidInstance(format!(
                    "row {i} has length {}, expected {n}",
                    row.len()
                )));
            }
            entries.extend(row);
        }
        Self::from_row_major(model, m, n, entries)
    }

    pub fn from_row_major(model: NormModel, m: usize, n: usize, entries: Vec<T>) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(DiscError::InvalidInstance(format!(
                "dimensions must be positive (m = {m}, n = {n})"
            )));
        }
        if entries.len() != m * n {
            return Err(DiscError::DimensionMismatch {
                expected: m * n,
                got: entries.len(),
            });
        }
        let inst = Instance { n, m, entries, model };
        inst.check_finite()?;
        inst.check_model(model)?;
        Ok(inst)
    }

    pub fn zeros(model: NormModel, m: usize, n: usize) -> Result<Self> {
        Self::from_row_major(model, m, n, vec![T::zero(); m * n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn model(&self) -> NormModel {
        self.model
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[T]> + '_ {
        self.entries.chunks_exact(self.n)
    }

    pub fn entry(&self, i: usize, j: usize) -> T {
        self.entries[i * self.n + j]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.m).map(|i| self.entry(i, j)).collect()
    }

    /// Column-major copy widened to `f64`; the solvers' working layout.
    pub fn columns_wide(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.m * self.n);
        for j in 0..self.n {
            out.extend((0..self.m).map(|i| self.entry(i, j).wide()));
        }
        out
    }

    pub fn row_norm(&self, i: usize) -> f64 {
        sum_of_squares(self.row(i).iter().copied()).sqrt()
    }

    pub fn max_row_norm(&self) -> f64 {
        (0..self.m).map(|i| self.row_norm(i)).fold(0.0, f64::max)
    }

    /// `sum_i |x_i|_2^2`, independent of entry order.
    pub fn total_sum_sq(&self) -> f64 {
        sum_of_squares(self.entries.iter().copied())
    }

    fn check_finite(&self) -> Result<()> {
        for (k, v) in self.entries.iter().enumerate() {
            if !v.is_finite() {
                return Err(DiscError::InvalidInstance(format!(
                    "non-finite entry at row {}, column {}",
                    k / self.n,
                    k % self.n
                )));
            }
        }
        Ok(())
    }

    /// Check the rows against `model` without relabelling the instance.
    pub fn check_model(&self, model: NormModel) -> Result<()> {
        let violation = |detail: String| DiscError::ModelViolation {
            model: model.name(),
            detail,
        };
        match model {
            NormModel::KashinSumSq => {
                let total = self.total_sum_sq();
                if !within(total, self.m as f64) {
                    return Err(violation(format!(
                        "sum of squared row norms {total} exceeds m = {}",
                        self.m
                    )));
                }
            }
            NormModel::KomlosUnit => {
                for j in 0..self.n {
                    let norm_sq = sum_of_squares(self.column(j));
                    if !within(norm_sq, 1.0) {
                        return Err(violation(format!("column {j} has squared norm {norm_sq} > 1")));
                    }
                }
            }
            NormModel::BoxInf => {
                for (k, v) in self.entries.iter().enumerate() {
                    let a = v.wide().abs();
                    if !within(a, 1.0) {
                        return Err(violation(format!(
                            "row {}, column {}: |entry| = {a} > 1",
                            k / self.n,
                            k % self.n
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn satisfies(&self, model: NormModel) -> bool {
        self.check_model(model).is_ok()
    }

    /// Same rows under a different declared model (re-validated).
    pub fn with_model(&self, model: NormModel) -> Result<Self> {
        Self::from_row_major(model, self.m, self.n, self.entries.clone())
    }

    /// Every entry multiplied by `factor`, declared under `model`.
    pub fn scaled(&self, factor: f64, model: NormModel) -> Result<Self> {
        let entries = self.entries.iter().map(|&v| T::narrow(v.wide() * factor)).collect();
        Self::from_row_major(model, self.m, self.n, entries)
    }

    /// Keep only the columns listed in `active` (strictly increasing, 0-based).
    pub fn restrict(&self, active: &[usize]) -> Result<Self> {
        validate_active(active, self.n)?;
        let mut entries = Vec::with_capacity(self.m * active.len());
        for row in self.rows() {
            entries.extend(active.iter().map(|&j| row[j]));
        }
        Self::from_row_major(self.model, self.m, active.len(), entries)
    }

    /// Row signs flipped (rows `i` with `flip(i)` negated).
    pub fn with_row_signs(&self, flip: impl Fn(usize) -> bool) -> Self {
        let mut out = self.clone();
        for i in 0..self.m {
            if flip(i) {
                for v in &mut out.entries[i * self.n..(i + 1) * self.n] {
                    *v = -*v;
                }
            }
        }
        out
    }
}

/// Active sets are nonempty, strictly increasing, and in range.
pub fn validate_active(active: &[usize], n: usize) -> Result<()> {
    if active.is_empty() {
        return Err(DiscError::EmptyActiveSet);
    }
    for (k, &j) in active.iter().enumerate() {
        if j >= n {
            return Err(DiscError::IndexOutOfRange { index: j, n });
        }
        if k > 0 && active[k - 1] >= j {
            return Err(DiscError::InvalidParameter(
                "active indices must be strictly increasing".into(),
            ));
        }
    }
    Ok(())
}
