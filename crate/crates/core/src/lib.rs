//! Partial colorings, full colorings and Komlós signed sums for
//! combinatorial discrepancy, together with the volume and lattice-point
//! counting certificate that guarantees a partial coloring exists.
//!
//! Instance storage is generic over [`Scalar`] (`f32` or `f64`);
//! inner products are always accumulated in `f64`. The `*64` aliases
//! below are what the command-line tool uses.

pub mod certificate;
pub mod coloring;
pub mod error;
pub mod evaluate;
pub mod generate;
pub mod instance;
pub mod io;
pub mod komlos;
pub mod recursion;
pub mod rng;
pub mod scalar;
pub mod solvers;

pub use certificate::{
    build_vaaler_matrix, certify, count_small_support, counting_verdict, det_upper_bound, membership, scan_verdicts,
    select_lambda, volume_check, Certificate, DetBound, VaalerMatrix, VolumeEstimate, CERTIFIED_CONSTANT,
    DEFAULT_DELTA,
};
pub use coloring::{merge, support_threshold, Coloring};
pub use error::{DiscError, Result};
pub use evaluate::{evaluate, DiscrepancyReport};
pub use generate::{generate, Family, Generated, GeneratorSpec};
pub use instance::{Instance, NormModel};
pub use komlos::{signed_sum, solve_komlos, solve_komlos_partial, transpose_reduce, KomlosInstance};
pub use recursion::{full_coloring, iterate_partial, plan_rounds, FinalMethod, RecursionTrace, RoundRecord};
pub use scalar::Scalar;
pub use solvers::{solve, solve_anneal, solve_exhaustive, solve_random_full, Method, SolveResult, SolverBudget};

pub type Instance64 = Instance<f64>;
pub type Instance32 = Instance<f32>;
pub type KomlosInstance64 = KomlosInstance<f64>;
pub type KomlosInstance32 = KomlosInstance<f32>;
pub type VaalerMatrix64 = VaalerMatrix<f64>;
pub type Generated64 = Generated<f64>;
