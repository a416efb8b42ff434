//! Simulated annealing over ternary colorings.

use rand::Rng;
use rayon::prelude::*;

use super::{better_of, Method, SolveResult, SolverBudget};
use crate::coloring::Coloring;
use crate::error::{DiscError, Result};
use crate::evaluate::evaluate;
use crate::instance::Instance;
use crate::rng::{derive_seed, stream_rng};
use crate::scalar::Scalar;

/// Final temperature as a fraction of the initial one.
const COOLING_SPAN: f64 = 1e-3;
/// Penalty per missing unit of support, in multiples of the incumbent discrepancy.
const SUPPORT_PENALTY: f64 = 2.0;
/// Inner products are rebuilt from scratch this often to cap drift.
const RESYNC_EVERY: u64 = 8192;

struct Chain<'a> {
    columns: &'a [f64],
    m: usize,
    n: usize,
    min_support: usize,
}

impl Chain<'_> {
    fn column(&self, j: usize) -> &[f64] {
        &self.columns[j * self.m..(j + 1) * self.m]
    }

    fn rebuild(&self, values: &[i8], ip: &mut [f64]) {
        ip.fill(0.0);
        for (j, &v) in values.iter().enumerate() {
            if v != 0 {
                let v = f64::from(v);
                for (acc, &c) in ip.iter_mut().zip(self.column(j)) {
                    *acc += v * c;
                }
            }
        }
    }

    /// `max_i |ip_i + diff * col_i|`.
    fn shifted_max(ip: &[f64], diff: f64, col: &[f64]) -> f64 {
        ip.iter()
            .zip(col)
            .fold(0.0f64, |a, (&v, &c)| a.max((v + diff * c).abs()))
    }

    /// Returns the best state with support `>= min_support` seen on the chain.
    fn run(&self, seed: u64, steps: u64, t0: f64) -> Vec<i8> {
        let mut rng = stream_rng(seed, 0);
        let mut values: Vec<i8> = (0..self.n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
        let mut ip = vec![0.0; self.m];
        self.rebuild(&values, &mut ip);
        let mut support = self.n;
        let mut cur = ip.iter().fold(0.0f64, |a, &v| a.max(v.abs()));

        let mut best = values.clone();
        let mut best_max = cur;
        let missing = |s: usize| self.min_support.saturating_sub(s) as f64;
        let cooling = COOLING_SPAN.powf(1.0 / steps.max(1) as f64);
        let mut temp = t0;
        for step in 0..steps {
            if best_max == 0.0 {
                break;
            }
            let j = rng.random_range(0..self.n);
            let old = values[j];
            let up: bool = rng.random();
            let new = match (old, up) {
                (-1, false) => 0,
                (-1, true) => 1,
                (0, false) => -1,
                (0, true) => 1,
                (_, false) => -1,
                (_, true) => 0,
            };
            let diff = f64::from(new - old);
            let col = self.column(j);
            let cand = Self::shifted_max(&ip, diff, col);
            let new_support = support + usize::from(new != 0) - usize::from(old != 0);
            let penalty = SUPPORT_PENALTY * best_max;
            let delta = (cand + penalty * missing(new_support)) - (cur + penalty * missing(support));
            if delta <= 0.0 || rng.random::<f64>() < (-delta / temp).exp() {
                values[j] = new;
                support = new_support;
                for (acc, &c) in ip.iter_mut().zip(col) {
                    *acc += diff * c;
                }
                cur = cand;
                if support >= self.min_support && cur < best_max {
                    best_max = cur;
                    best.copy_from_slice(&values);
                }
            }
            if (step + 1) % RESYNC_EVERY == 0 {
                self.rebuild(&values, &mut ip);
                cur = ip.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
            }
            temp *= cooling;
        }
        best
    }
}

/// Anneal from random full colorings; restarts run in parallel on derived
/// seeds and are reduced with the solver tie-break, so the result depends
/// only on `budget.seed`.
///
/// Temperature cools geometrically from `max_i |x_i|_2` to `1e-3` of that.
/// States below `min_support` are visited with a penalty but never returned;
/// since every chain starts at full support, a feasible state always exists.
pub fn solve_anneal<T: Scalar>(
    instance: &Instance<T>,
    min_support: usize,
    budget: &SolverBudget,
) -> Result<SolveResult> {
    let n = instance.n();
    if min_support > n {
        return Err(DiscError::InvalidParameter(format!(
            "min_support {min_support} exceeds n = {n}"
        )));
    }
    let columns = instance.columns_wide();
    let chain = Chain {
        columns: &columns,
        m: instance.m(),
        n,
        min_support,
    };
    let t0 = instance.max_row_norm();
    let restarts = budget.restarts.max(1);
    (0..restarts)
        .into_par_iter()
        .map(|r| {
            let values = chain.run(derive_seed(budget.seed, &[r as u64]), budget.anneal_steps, t0);
            let coloring = Coloring::from_trusted(values);
            let report = evaluate(instance, &coloring)?;
            Ok(SolveResult {
                coloring,
                report,
                method: Method::Anneal,
                optimal: false,
                attempts: restarts as usize,
            })
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .reduce(better_of)
        .ok_or_else(|| DiscError::InvalidParameter("no restarts".into()))
}
