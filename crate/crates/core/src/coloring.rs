//! Ternary colorings and their arithmetic.

use std::ops::Neg;

use serde::{Deserialize, Serialize};

use crate::error::{DiscError, Result};
use crate::instance::validate_active;

/// A vector in `{-1, 0, 1}^n` with its support size cached.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ColoringRepr")]
pub struct Coloring {
    values: Vec<i8>,
    support: usize,
}

#[derive(Deserialize)]
struct ColoringRepr {
    values: Vec<i64>,
    #[serde(default)]
    support: Option<usize>,
}

impl TryFrom<ColoringRepr> for Coloring {
    type Error = DiscError;

    fn try_from(repr: ColoringRepr) -> Result<Self> {
        let values = repr
            .values
            .iter()
            .enumerate()
            .map(|(index, &value)| match value {
                -1..=1 => Ok(value as i8),
                _ => Err(DiscError::InvalidColoring { index, value }),
            })
            .collect::<Result<Vec<_>>>()?;
        let coloring = Coloring::new(values)?;
        if let Some(s) = repr.support {
            if s != coloring.support {
                return Err(DiscError::InvalidParameter(format!(
                    "declared support {s} does not match {} nonzero values",
                    coloring.support
                )));
            }
        }
        Ok(coloring)
    }
}

impl Coloring {
    pub fn new(values: Vec<i8>) -> Result<Self> {
        if let Some(index) = values.iter().position(|v| !(-1..=1).contains(v)) {
            return Err(DiscError::InvalidColoring {
                index,
                value: values[index] as i64,
            });
        }
        let support = values.iter().filter(|&&v| v != 0).count();
        Ok(Coloring { values, support })
    }

    /// Caller guarantees every value is in `{-1, 0, 1}`.
    pub(crate) fn from_trusted(values: Vec<i8>) -> Self {
        debug_assert!(values.iter().all(|v| (-1..=1).contains(v)));
        let support = values.iter().filter(|&&v| v != 0).count();
        Coloring { values, support }
    }

    pub fn zeros(n: usize) -> Self {
        Coloring {
            values: vec![0; n],
            support: 0,
        }
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn support(&self) -> usize {
        self.support
    }

    pub fn zero_count(&self) -> usize {
        self.values.len() - self.support
    }

    pub fn is_full(&self) -> bool {
        self.support == self.values.len()
    }

    pub fn support_fraction(&self) -> f64 {
        if self.values.is_empty() {
            0.0
        } else {
            self.support as f64 / self.values.len() as f64
        }
    }

    /// Indices of uncolored coordinates, increasing.
    pub fn zero_set(&self) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(j, &v)| (v == 0).then_some(j))
            .collect()
    }

    /// Coordinate-wise sum, if it stays ternary.
    pub fn checked_add(&self, other: &Coloring) -> Option<Coloring> {
        if self.len() != other.len() {
            return None;
        }
        let values: Option<Vec<i8>> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| {
                let s = a + b;
                (-1..=1).contains(&s).then_some(s)
            })
            .collect();
        values.map(Coloring::from_trusted)
    }
}

impl Neg for &Coloring {
    type Output = Coloring;

    fn neg(self) -> Coloring {
        Coloring {
            values: self.values.iter().map(|v| -v).collect(),
            support: self.support,
        }
    }
}

/// Smallest integer support meeting the `n/6` bound, i.e. `ceil(n / 6)`.
pub fn support_threshold(n: usize) -> usize {
    n.div_ceil(6)
}

/// Write `patch` into the `active` positions of `base`.
///
/// `base` must be zero on every active position; `patch` may itself contain zeros.
pub fn merge(base: &Coloring, patch: &Coloring, active: &[usize]) -> Result<Coloring> {
    validate_active(active, base.len())?;
    if patch.len() != active.len() {
        return Err(DiscError::DimensionMismatch {
            expected: active.len(),
            got: patch.len(),
        });
    }
    let mut values = base.values.clone();
    for (&j, &v) in active.iter().zip(&patch.values) {
        if values[j] != 0 {
            return Err(DiscError::MergeConflict { index: j });
        }
        values[j] = v;
    }
    Ok(Coloring::from_trusted(values))
}
