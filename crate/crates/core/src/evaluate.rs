//! The discrepancy verifier.

use serde::{Deserialize, Serialize};

use crate::coloring::Coloring;
use crate::error::{DiscError, Result};
use crate::instance::Instance;
use crate::scalar::{dot_wide, Scalar};

/// Inner products of a coloring with every row, and their maximum modulus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyReport {
    pub inner_products: Vec<f64>,
    pub max_abs: f64,
    pub support: usize,
    pub support_fraction: f64,
}

impl DiscrepancyReport {
    pub fn from_inner_products(inner_products: Vec<f64>, coloring: &Coloring) -> Self {
        let max_abs = inner_products.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        DiscrepancyReport {
            inner_products,
            max_abs,
            support: coloring.support(),
            support_fraction: coloring.support_fraction(),
        }
    }
}

/// `<eps, x_i>` for every row, pairwise-summed in `f64`.
pub fn evaluate<T: Scalar>(instance: &Instance<T>, coloring: &Coloring) -> Result<DiscrepancyReport> {
    if coloring.len() != instance.n() {
        return Err(DiscError::DimensionMismatch {
            expected: instance.n(),
            got: coloring.len(),
        });
    }
    let eps: Vec<f64> = coloring.values().iter().map(|&v| f64::from(v)).collect();
    let inner_products = instance.rows().map(|row| dot_wide(row, &eps)).collect();
    Ok(DiscrepancyReport::from_inner_products(inner_products, coloring))
}
