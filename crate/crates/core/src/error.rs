use thiserror::Error;

use crate::space::Violation;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("distance matrix has {rows} rows (row {row} has {cols} entries) but {labels} labels")]
    DimensionMismatch {
        labels: usize,
        rows: usize,
        row: usize,
        cols: usize,
    },

    #[error("invalid distance {value} at ({i}, {j})")]
    InvalidEntry { i: usize, j: usize, value: f64 },

    #[error("not a metric: {0}")]
    NotMetric(Violation),

    #[error("weight vector has length {got}, expected {expected}")]
    WeightLength { expected: usize, got: usize },

    #[error("invalid weight {value} at index {index}")]
    InvalidWeight { index: usize, value: f64 },

    #[error("weights must sum to 1 (sum = {0})")]
    NotNormalized(f64),

    #[error("measure must have full support, but point {0} has zero weight")]
    NotFullSupport(usize),

    #[error("index {index} out of range for a space of {len} points")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("kappa must lie in (0, 1), got {0}")]
    KappaOutOfRange(f64),

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },

    #[error("{0} is empty")]
    Empty(&'static str),

    #[error("operands live on spaces of different sizes ({0} vs {1})")]
    SpaceMismatch(usize, usize),

    #[error("instance too large for exact {what}: size {size} exceeds limit {limit}")]
    TooLarge {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("search budget exhausted after {0} nodes")]
    BudgetExceeded(u64),
}

pub type Result<T> = core::result::Result<T, Error>;
