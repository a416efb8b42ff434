//! Exact search over `{-1, 0, 1}^n`.
//!
//! The index space is cut into a fixed number of chunks by pinning the
//! highest coordinates; each chunk walks the remaining coordinates in
//! reflected Gray order so every step is one column update. Chunk winners
//! are combined with [`tie_break`], a total order, so the answer does not
//! depend on how rayon schedules the chunks.

use std::cmp::Ordering;

use rayon::prelude::*;

use super::gray::ReflectedGray;
use super::{tie_break, Method, SolveResult};
use crate::coloring::Coloring;
use crate::error::{DiscError, Result};
use crate::evaluate::evaluate;
use crate::instance::Instance;
use crate::scalar::Scalar;

/// Largest `n` accepted by [`solve_exhaustive`].
pub const EXHAUSTIVE_MAX_N: usize = 16;

// Incremental sums drift; anything this close to the incumbent is re-scored
// exactly before comparing.
const TIE_SLACK: f64 = 1e-9;

struct Search<'a, T: Scalar> {
    instance: &'a Instance<T>,
    columns: Vec<f64>,
    m: usize,
    n: usize,
    min_support: usize,
    radix: u8,
    pinned: usize,
}

struct Best {
    coloring: Coloring,
    max_abs: f64,
}

impl<T: Scalar> Search<'_, T> {
    fn value(&self, digit: u8) -> i8 {
        if self.radix == 3 {
            digit as i8 - 1
        } else {
            2 * digit as i8 - 1
        }
    }

    fn column(&self, j: usize) -> &[f64] {
        &self.columns[j * self.m..(j + 1) * self.m]
    }

    fn offer(&self, best: &mut Option<Best>, values: &[i8], approx_max: f64) {
        if let Some(b) = best.as_ref() {
            if approx_max > b.max_abs + TIE_SLACK * (1.0 + b.max_abs) {
                return;
            }
        }
        let coloring = Coloring::from_trusted(values.to_vec());
        let exact = evaluate(self.instance, &coloring)
            .expect("dimensions fixed by construction")
            .max_abs;
        let replace = match best.as_ref() {
            None => true,
            Some(b) => tie_break((&coloring, exact), (&b.coloring, b.max_abs)) == Ordering::Less,
        };
        if replace {
            *best = Some(Best {
                coloring,
                max_abs: exact,
            });
        }
    }

    fn run_chunk(&self, chunk: u64) -> Option<Best> {
        let (m, n) = (self.m, self.n);
        let free = n - self.pinned;
        let mut values = vec![0i8; n];
        let mut rest = chunk;
        for v in &mut values[free..] {
            *v = self.value((rest % self.radix as u64) as u8);
            rest /= self.radix as u64;
        }
        let mut gray = ReflectedGray::new(free, self.radix);
        for (v, &d) in values[..free].iter_mut().zip(gray.digits()) {
            *v = self.value(d);
        }

        let mut ip = vec![0.0f64; m];
        for (j, &v) in values.iter().enumerate() {
            if v != 0 {
                let v = f64::from(v);
                for (acc, &c) in ip.iter_mut().zip(self.column(j)) {
                    *acc += v * c;
                }
            }
        }
        let mut support = values.iter().filter(|&&v| v != 0).count();
        let mut best = None;
        if support >= self.min_support {
            let max = ip.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
            self.offer(&mut best, &values, max);
        }
        while let Some((j, old, new)) = gray.step() {
            let (vo, vn) = (self.value(old), self.value(new));
            values[j] = vn;
            support = support + usize::from(vn != 0) - usize::from(vo != 0);
            let diff = f64::from(vn - vo);
            let mut max = 0.0f64;
            for (acc, &c) in ip.iter_mut().zip(self.column(j)) {
                *acc += diff * c;
                max = max.max(acc.abs());
            }
            if support >= self.min_support {
                self.offer(&mut best, &values, max);
            }
        }
        best
    }
}

/// Enumerate every coloring with support at least `min_support` and return
/// the best under [`tie_break`]. Refuses `n > 16`.
pub fn solve_exhaustive<T: Scalar>(instance: &Instance<T>, min_support: usize) -> Result<SolveResult> {
    let n = instance.n();
    if n > EXHAUSTIVE_MAX_N {
        return Err(DiscError::TooLarge {
            n,
            limit: EXHAUSTIVE_MAX_N,
        });
    }
    if min_support > n {
        return Err(DiscError::InvalidParameter(format!(
            "min_support {min_support} exceeds n = {n}"
        )));
    }
    // Full colorings only need the 2^n sign vectors.
    let radix: u8 = if min_support == n { 2 } else { 3 };
    let pinned = n.min(if radix == 3 { 4 } else { 6 });
    let search = Search {
        instance,
        columns: instance.columns_wide(),
        m: instance.m(),
        n,
        min_support,
        radix,
        pinned,
    };
    let chunks = (radix as u64).pow(pinned as u32);
    let best = (0..chunks)
        .into_par_iter()
        .filter_map(|c| search.run_chunk(c))
        .reduce_with(
            |a, b| match tie_break((&a.coloring, a.max_abs), (&b.coloring, b.max_abs)) {
                Ordering::Greater => b,
                _ => a,
            },
        )
        .expect("the full sign vectors always satisfy the support bound");
    let report = evaluate(instance, &best.coloring)?;
    Ok(SolveResult {
        coloring: best.coloring,
        report,
        method: Method::Exhaustive,
        optimal: true,
        attempts: 1,
    })
}
