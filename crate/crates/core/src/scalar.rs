//! Scalar abstraction and the summation kernels every module shares.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point element type of instance matrices.
///
/// Storage is generic; accumulation always happens in `f64`, the widest
/// native format, so verifier output does not depend on the storage width.
pub trait Scalar: Float + FromPrimitive + ToPrimitive + Default + Debug + Display + Send + Sync + 'static {
    #[inline]
    fn wide(self) -> f64 {
        // Float -> f64 never fails for the primitive floats.
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn narrow(x: f64) -> Self {
        Self::from_f64(x).unwrap_or_else(Self::nan)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

const PAIRWISE_BLOCK: usize = 32;

/// Pairwise (cascade) summation: error grows like `O(log n)` ulps.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= PAIRWISE_BLOCK {
        let mut acc = 0.0;
        for &v in values {
            acc += v;
        }
        acc
    } else {
        let mid = values.len() / 2;
        pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
    }
}

/// Pairwise-summed inner product of a stored row with a widened vector.
pub fn dot_wide<T: Scalar, U: Copy + Into<f64>>(row: &[T], z: &[U]) -> f64 {
    debug_assert_eq!(row.len(), z.len());
    if row.len() <= PAIRWISE_BLOCK {
        let mut acc = 0.0;
        for (&a, &b) in row.iter().zip(z) {
            acc += a.wide() * b.into();
        }
        acc
    } else {
        let mid = row.len() / 2;
        dot_wide(&row[..mid], &z[..mid]) + dot_wide(&row[mid..], &z[mid..])
    }
}

/// Sum of squares that depends only on the multiset of entries.
///
/// Squares are sorted before the pairwise reduction, so any permutation of
/// the same entries (e.g. a matrix and its transpose) gives a bit-equal sum.
pub fn sum_of_squares<T: Scalar>(entries: impl IntoIterator<Item = T>) -> f64 {
    let mut squares: Vec<f64> = entries
        .into_iter()
        .map(|x| {
            let w = x.wide();
            w * w
        })
        .collect();
    squares.sort_by(f64::total_cmp);
    pairwise_sum(&squares)
}
