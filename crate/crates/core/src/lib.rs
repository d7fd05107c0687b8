//! # mmspace-core
//!
//! Exact computation of metric-measure invariants on finite spaces.
//!
//! A finite mm space is a labelled distance matrix together with a probability
//! vector of full support. On such spaces every infimum and supremum in the
//! classical definitions ranges over a finite set, so the quantities below are
//! computed exactly (up to a global comparison tolerance):
//!
//! | Quantity | Entry point |
//! |----------|-------------|
//! | partial diameter `Diam(mu; 1 - kappa)` | [`metrics::partial_diameter`] |
//! | Prokhorov distance | [`metrics::prokhorov`] |
//! | Ky Fan distance between maps | [`metrics::ky_fan`] |
//! | Hausdorff distance between subsets | [`metrics::hausdorff_subsets`] |
//! | 1-Lipschitz families and their error-relaxed variants | [`lipschitz`] |
//! | observable diameter with a screen | [`obsdiam::obsdiam`] |
//! | box and Gromov-Hausdorff distances | [`coupling`] |
//!
//! Most exact routines are paired with an independent brute-force route
//! (`*_oracle`, [`obsdiam::obsdiam_exhaustive`], [`coupling::gh_distance_oracle`])
//! that follows the textbook definition literally and is meant for small
//! instances and tests.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and the
//! experiment drivers live in the companion `mmspace` crate.

#![no_std]
#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bitset;
pub mod coupling;
mod error;
pub mod flow;
pub mod generators;
pub mod lipschitz;
pub mod metrics;
pub mod obsdiam;
pub mod report;
pub mod space;

pub use error::{Error, Result};
pub use space::{
    neighborhood, pushforward, subset_diameter, validate, FiniteMMSpace, FiniteMetricSpace,
    PointedMetricSpace, ProbabilityWeights, Validation, Violation,
};

/// Default tolerance for threshold comparisons (distances against radii,
/// masses against budgets).
pub const DEFAULT_TOL: f64 = 1e-9;

/// Tolerance used when checking metric axioms and normalization of weights.
pub const AXIOM_TOL: f64 = 1e-12;

/// Default node budget for backtracking searches.
pub const DEFAULT_MAX_NODES: u64 = 50_000_000;
