//! Checkable objects behind the partial-coloring existence argument: the
//! polytope `E_lambda`, its Vaaler matrix, the determinant and counting
//! bounds, and a Monte-Carlo estimate of `vol(E_lambda)`.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::distr::{Distribution, Uniform};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{DiscError, Result};
use crate::instance::{Instance, NormModel};
use crate::rng::stream_rng;
use crate::scalar::{dot_wide, sum_of_squares, Scalar};

pub const DEFAULT_DELTA: f64 = 0.01;

/// Grid on which `select_lambda` searches.
pub const LAMBDA_GRID_STEP: f64 = 1e-4;

/// Certified discrepancy constant `c`, i.e. `(2 - delta) / lambda` at the
/// default `delta` (about 13.97), rounded up.
pub const CERTIFIED_CONSTANT: f64 = 14.0;

/// Exact small-support counts are carried in certificates up to this `n`.
pub const EXACT_COUNT_MAX_N: usize = 64;

/// Two-sided 99% normal quantile used for the Wilson interval.
const Z_99: f64 = 2.575_829_303_548_900_4;

const VOLUME_CHUNK: u64 = 1 << 14;

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(DiscError::InvalidParameter(format!(
            "delta must lie in (0, 1), got {delta}"
        )))
    }
}

fn lambda_admissible(lambda: f64, delta: f64) -> bool {
    1.0 + lambda * lambda < (1.0 - delta).powi(-2)
}

/// Largest `lambda` on the `1e-4` grid with `1 + lambda^2 < (1 - delta)^-2`.
///
/// The condition is per coordinate, so the result does not depend on `n`.
/// For `delta` so small that no grid point qualifies, half the exact
/// supremum is returned instead.
pub fn select_lambda(delta: f64) -> Result<f64> {
    check_delta(delta)?;
    let sup = ((1.0 - delta).powi(-2) - 1.0).sqrt();
    let mut k = (sup / LAMBDA_GRID_STEP).floor() as u64;
    while k > 0 && !lambda_admissible(k as f64 / 10_000.0, delta) {
        k -= 1;
    }
    while lambda_admissible((k + 1) as f64 / 10_000.0, delta) {
        k += 1;
    }
    if k == 0 {
        Ok(sup / 2.0)
    } else {
        Ok(k as f64 / 10_000.0)
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(DiscError::InvalidParameter(format!(
            "lambda must be positive, got {lambda}"
        )))
    }
}

/// Is `z` in `scale * E_lambda`?
///
/// True iff `|z|_inf <= scale` and `max_i |<z, x_i>| <= (scale / lambda) sqrt(m / n)`.
pub fn membership<T: Scalar>(instance: &Instance<T>, lambda: f64, scale: f64, z: &[f64]) -> Result<bool> {
    if z.len() != instance.n() {
        return Err(DiscError::DimensionMismatch {
            expected: instance.n(),
            got: z.len(),
        });
    }
    let radius = (scale / lambda) * (instance.m() as f64 / instance.n() as f64).sqrt();
    Ok(z.iter().all(|v| v.abs() <= scale) && instance.rows().all(|row| dot_wide(row, z).abs() <= radius))
}

/// The `(m + n) x n` matrix whose preimage of the cube `[-1/2, 1/2]^d` is `E_lambda`.
///
/// Rows `0..m` are `(lambda / 2) sqrt(n / m) x_i`; rows `m..m+n` are `e_j / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct VaalerMatrix<T: Scalar> {
    m: usize,
    n: usize,
    lambda: f64,
    entries: Vec<T>,
}

impl<T: Scalar> VaalerMatrix<T> {
    pub fn d(&self) -> usize {
        self.m + self.n
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn row(&self, k: usize) -> &[T] {
        &self.entries[k * self.n..(k + 1) * self.n]
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    /// `1{Az in Q_d}`.
    pub fn maps_into_cube(&self, z: &[f64]) -> bool {
        assert_eq!(z.len(), self.n);
        (0..self.d()).all(|k| dot_wide(self.row(k), z).abs() <= 0.5)
    }

    /// `tr(A^T A)`, the sum of all squared entries.
    pub fn gram_trace(&self) -> f64 {
        sum_of_squares(self.entries.iter().copied())
    }

    /// `A^T A` as a dense row-major `n x n` matrix.
    pub fn gram(&self) -> Vec<f64> {
        let n = self.n;
        let mut g = vec![0.0; n * n];
        for k in 0..self.d() {
            let row = self.row(k);
            for a in 0..n {
                let ra = row[a].wide();
                if ra == 0.0 {
                    continue;
                }
                for b in 0..n {
                    g[a * n + b] += ra * row[b].wide();
                }
            }
        }
        g
    }
}

fn require_kashin<T: Scalar>(instance: &Instance<T>) -> Result<()> {
    instance.check_model(NormModel::KashinSumSq)
}

pub fn build_vaaler_matrix<T: Scalar>(instance: &Instance<T>, lambda: f64) -> Result<VaalerMatrix<T>> {
    check_lambda(lambda)?;
    require_kashin(instance)?;
    let (m, n) = (instance.m(), instance.n());
    let factor = (lambda / 2.0) * (n as f64 / m as f64).sqrt();
    let mut entries = Vec::with_capacity((m + n) * n);
    for row in instance.rows() {
        entries.extend(row.iter().map(|&v| T::narrow(v.wide() * factor)));
    }
    for j in 0..n {
        entries.extend((0..n).map(|k| if k == j { T::narrow(0.5) } else { T::zero() }));
    }
    Ok(VaalerMatrix { m, n, lambda, entries })
}

/// Upper bounds on `det(A^T A)` via AM-GM on the eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetBound {
    /// `(tr(A^T A) / n)^n` from the actual instance.
    pub trace_based: f64,
    /// `((lambda^2 + 1) / 4)^n`, valid for every Kashin instance.
    pub closed_form: f64,
    pub ln_trace_based: f64,
    pub ln_closed_form: f64,
}

pub fn det_upper_bound<T: Scalar>(instance: &Instance<T>, lambda: f64) -> Result<DetBound> {
    let a = build_vaaler_matrix(instance, lambda)?;
    let n = instance.n() as f64;
    let ln_trace_based = n * (a.gram_trace() / n).ln();
    let ln_closed_form = closed_form_ln_det(instance.n(), lambda);
    Ok(DetBound {
        trace_based: ln_trace_based.exp(),
        closed_form: ln_closed_form.exp(),
        ln_trace_based,
        ln_closed_form,
    })
}

fn closed_form_ln_det(n: usize, lambda: f64) -> f64 {
    n as f64 * ((lambda * lambda + 1.0) / 4.0).ln()
}

/// Number of ternary vectors of length `n` with `|x|_1 <= n/6`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmallSupportCount {
    /// `sum_{r <= floor(n/6)} C(n, r) 2^r`.
    pub exact: BigUint,
    /// `ln (12e)^{n/6}`.
    pub ln_cap: f64,
}

pub fn count_small_support(n: usize) -> Result<SmallSupportCount> {
    if n == 0 {
        return Err(DiscError::InvalidParameter("n must be positive".into()));
    }
    let mut total = BigUint::zero();
    let mut binom = BigUint::one();
    let mut pow2 = BigUint::one();
    for r in 0..=n / 6 {
        if r > 0 {
            binom = binom * BigUint::from(n - r + 1) / BigUint::from(r);
            pow2 <<= 1;
        }
        total += &binom * &pow2;
    }
    Ok(SmallSupportCount {
        exact: total,
        ln_cap: small_support_ln_cap(n),
    })
}

fn small_support_ln_cap(n: usize) -> f64 {
    (n as f64 / 6.0) * (12.0f64.ln() + 1.0)
}

/// Everything needed to replay the existence argument for one `(n, delta)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub n: usize,
    pub lambda: f64,
    pub delta: f64,
    pub lambda_rule: String,
    pub det_bound: f64,
    pub det_bound_closed_form: f64,
    pub volume_lb: f64,
    pub count_lb: f64,
    pub small_support_count: f64,
    /// Exact count as a decimal string, present for `n <= 64`.
    pub small_support_exact: Option<String>,
    pub ln_det_bound: f64,
    pub ln_volume_lb: f64,
    pub ln_count_lb: f64,
    pub ln_small_support_count: f64,
    /// `c = (2 - delta) / lambda` implied by these parameters.
    pub implied_constant: f64,
    pub volume_ok: bool,
    pub counting_ok: bool,
    pub verdict: bool,
}

fn assemble(n: usize, delta: f64, lambda: f64, ln_det_bound: f64) -> Certificate {
    let nf = n as f64;
    let ln_closed = closed_form_ln_det(n, lambda);
    let ln_volume_lb = nf * (2.0f64.ln() + (1.0 - delta).ln());
    let ln_count_lb = 2.0f64.ln() + nf * ((2.0 - delta).ln() + (1.0 - delta).ln());
    let ln_small = small_support_ln_cap(n);
    let volume_ok = -0.5 * ln_det_bound >= ln_volume_lb;
    let counting_ok = ln_count_lb > ln_small;
    let small_support_exact = (n <= EXACT_COUNT_MAX_N)
        .then(|| count_small_support(n).map(|c| c.exact.to_string()).ok())
        .flatten();
    Certificate {
        n,
        lambda,
        delta,
        lambda_rule: format!("largest multiple of {LAMBDA_GRID_STEP} with 1 + lambda^2 < (1 - delta)^-2"),
        det_bound: ln_det_bound.exp(),
        det_bound_closed_form: ln_closed.exp(),
        volume_lb: ln_volume_lb.exp(),
        count_lb: ln_count_lb.exp(),
        small_support_count: ln_small.exp(),
        small_support_exact,
        ln_det_bound,
        ln_volume_lb,
        ln_count_lb,
        ln_small_support_count: ln_small,
        implied_constant: (2.0 - delta) / lambda,
        volume_ok,
        counting_ok,
        verdict: volume_ok && counting_ok,
    }
}

/// Instance-free certificate using the closed-form determinant cap.
pub fn counting_verdict(n: usize, delta: f64) -> Result<Certificate> {
    if n == 0 {
        return Err(DiscError::InvalidParameter("n must be positive".into()));
    }
    let lambda = select_lambda(delta)?;
    Ok(assemble(n, delta, lambda, closed_form_ln_det(n, lambda)))
}

/// Certificate for a concrete Kashin instance, using its trace-based determinant bound.
pub fn certify<T: Scalar>(instance: &Instance<T>, delta: f64) -> Result<Certificate> {
    let lambda = select_lambda(delta)?;
    let det = det_upper_bound(instance, lambda)?;
    Ok(assemble(instance.n(), delta, lambda, det.ln_trace_based))
}

/// Outcome of checking the verdict over a range of `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictScan {
    pub delta: f64,
    pub scanned_up_to: usize,
    pub first_failure: Option<usize>,
    /// `(2 - delta)(1 - delta) > (12e)^{1/6}` with `(1 + lambda^2)^{-1/2} > 1 - delta`:
    /// sufficient for every `n` at once.
    pub per_coordinate_holds: bool,
}

pub fn scan_verdicts(delta: f64, max_n: usize) -> Result<VerdictScan> {
    let lambda = select_lambda(delta)?;
    let mut first_failure = None;
    for n in 1..=max_n {
        if !assemble(n, delta, lambda, closed_form_ln_det(n, lambda)).verdict {
            first_failure = Some(n);
            break;
        }
    }
    let per_coordinate_holds = (2.0 - delta).ln() + (1.0 - delta).ln() > small_support_ln_cap(1)
        && -0.5 * (1.0 + lambda * lambda).ln() > (1.0 - delta).ln();
    Ok(VerdictScan {
        delta,
        scanned_up_to: max_n,
        first_failure,
        per_coordinate_holds,
    })
}

/// Monte-Carlo estimate of `vol(E_lambda)` against the two lower bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeEstimate {
    pub samples: u64,
    pub hits: u64,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// `det_bound^{-1/2}` from the trace-based determinant bound.
    pub vaaler_lb: f64,
    /// `2^n (1 - delta)^n`.
    pub volume_lb: f64,
    pub violation: bool,
}

/// Wilson score interval for a binomial proportion at 99%.
pub fn wilson_interval(hits: u64, samples: u64) -> (f64, f64) {
    let nf = samples as f64;
    let p = hits as f64 / nf;
    let z2 = Z_99 * Z_99;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = Z_99 / denom * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
    let low = if hits == 0 { 0.0 } else { (center - half).max(0.0) };
    let high = if hits == samples { 1.0 } else { (center + half).min(1.0) };
    (low, high)
}

/// Sample `z` uniformly from `[-1, 1]^n` and count hits in `E_lambda`.
///
/// Samples are split into fixed chunks, each on its own counter-based
/// stream, so the estimate does not depend on the thread count.
pub fn volume_check<T: Scalar>(
    instance: &Instance<T>,
    lambda: f64,
    delta: f64,
    samples: u64,
    seed: u64,
) -> Result<VolumeEstimate> {
    if samples == 0 {
        return Err(DiscError::InvalidParameter("samples must be positive".into()));
    }
    check_delta(delta)?;
    let det = det_upper_bound(instance, lambda)?;
    let n = instance.n();
    let chunks = samples.div_ceil(VOLUME_CHUNK);
    let unit = Uniform::new_inclusive(-1.0f64, 1.0).expect("valid range");
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, c);
            let count = VOLUME_CHUNK.min(samples - c * VOLUME_CHUNK);
            let mut z = vec![0.0f64; n];
            let mut hits = 0u64;
            for _ in 0..count {
                for v in z.iter_mut() {
                    *v = unit.sample(&mut rng);
                }
                if membership(instance, lambda, 1.0, &z).unwrap_or(false) {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    let cube = 2.0f64.powi(n as i32);
    let (low, high) = wilson_interval(hits, samples);
    let vaaler_lb = (-0.5 * det.ln_trace_based).exp();
    let volume_lb = (n as f64 * (2.0 * (1.0 - delta)).ln()).exp();
    let ci_high = cube * high;
    Ok(VolumeEstimate {
        samples,
        hits,
        estimate: cube * hits.to_f64().unwrap_or(0.0) / samples as f64,
        ci_low: cube * low,
        ci_high,
        vaaler_lb,
        volume_lb,
        violation: ci_high < vaaler_lb || ci_high < volume_lb,
    })
}
