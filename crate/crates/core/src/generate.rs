//! Seeded instance families.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{DiscError, Result};
use crate::instance::{Instance, NormModel};
use crate::komlos::KomlosInstance;
use crate::rng::stream_rng;
use crate::scalar::{pairwise_sum, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// Fair-coin 0/1 entries (set-system incidence rows), box model.
    SetSystem01,
    /// Fair-coin +-1 entries, box model.
    RandomSigns,
    /// `n` columns uniform on the unit sphere of `R^m`.
    RandomUnitColumns,
    /// Sylvester-Hadamard rows scaled by `1/sqrt(n)`, sum-of-squares model.
    Hadamard,
    ZeroRows,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::SetSystem01,
        Family::RandomSigns,
        Family::RandomUnitColumns,
        Family::Hadamard,
        Family::ZeroRows,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::SetSystem01 => "set-system01",
            Family::RandomSigns => "random-signs",
            Family::RandomUnitColumns => "random-unit-columns",
            Family::Hadamard => "hadamard",
            Family::ZeroRows => "zero-rows",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = DiscError;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| DiscError::InvalidParameter(format!("unknown family {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub family: Family,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
}

/// Row-layout instances, or column-layout Komlós instances.
#[derive(Debug, Clone, PartialEq)]
pub enum Generated<T: Scalar> {
    Rows(Instance<T>),
    Columns(KomlosInstance<T>),
}

impl<T: Scalar> Generated<T> {
    pub fn into_rows(self) -> Result<Instance<T>> {
        match self {
            Generated::Rows(i) => Ok(i),
            Generated::Columns(_) => Err(DiscError::InvalidParameter(
                "expected a row-layout instance, got Komlós columns".into(),
            )),
        }
    }

    pub fn into_columns(self) -> Result<KomlosInstance<T>> {
        match self {
            Generated::Columns(k) => Ok(k),
            Generated::Rows(_) => Err(DiscError::InvalidParameter(
                "expected Komlós columns, got a row-layout instance".into(),
            )),
        }
    }
}

/// Entry `(i, j)` of the Sylvester-Hadamard matrix: `(-1)^popcount(i & j)`.
pub fn sylvester_entry(i: usize, j: usize) -> f64 {
    if (i & j).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn coin_rows<T: Scalar>(spec: &GeneratorSpec, map: impl Fn(bool) -> f64) -> Vec<T> {
    let mut entries = Vec::with_capacity(spec.m * spec.n);
    for i in 0..spec.m {
        let mut rng = stream_rng(spec.seed, i as u64);
        entries.extend((0..spec.n).map(|_| T::narrow(map(rng.random::<bool>()))));
    }
    entries
}

fn unit_column<T: Scalar>(seed: u64, stream: u64, m: usize) -> Vec<T> {
    let mut rng = stream_rng(seed, stream);
    loop {
        let g: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
        let sq: Vec<f64> = g.iter().map(|v| v * v).collect();
        let norm = pairwise_sum(&sq).sqrt();
        if norm > 1e-300 {
            return g.into_iter().map(|v| T::narrow(v / norm)).collect();
        }
    }
}

/// Deterministic in `spec`: each row (or column) draws from its own stream.
///
/// `Hadamard` takes the leading `m x n` block of the Sylvester matrix of
/// order `2^k >= max(n, m)`, so every row has norm 1 after scaling; when `n`
/// is a power of two and `m = n` this is the full Hadamard matrix.
pub fn generate<T: Scalar>(spec: &GeneratorSpec) -> Result<Generated<T>> {
    let GeneratorSpec { family, n, m, seed } = *spec;
    if n == 0 || m == 0 {
        return Err(DiscError::InvalidParameter(format!(
            "n and m must be positive (n = {n}, m = {m})"
        )));
    }
    let rows = |model, entries| Instance::from_row_major(model, m, n, entries).map(Generated::Rows);
    match family {
        Family::SetSystem01 => rows(NormModel::BoxInf, coin_rows(spec, |b| if b { 1.0 } else { 0.0 })),
        Family::RandomSigns => rows(NormModel::BoxInf, coin_rows(spec, |b| if b { 1.0 } else { -1.0 })),
        Family::ZeroRows => rows(NormModel::BoxInf, vec![T::zero(); m * n]),
        Family::Hadamard => {
            let scale = 1.0 / (n as f64).sqrt();
            let mut entries = Vec::with_capacity(m * n);
            for i in 0..m {
                entries.extend((0..n).map(|j| T::narrow(sylvester_entry(i, j) * scale)));
            }
            rows(NormModel::KashinSumSq, entries)
        }
        Family::RandomUnitColumns => {
            let mut columns = Vec::with_capacity(n * m);
            for i in 0..n {
                columns.extend(unit_column::<T>(seed, i as u64, m));
            }
            KomlosInstance::from_column_major(n, m, columns).map(Generated::Columns)
        }
    }
}
