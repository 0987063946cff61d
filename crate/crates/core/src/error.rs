use thiserror::Error;

use crate::algebra::Weight;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid series spec `{0}`")]
    InvalidSpec(String),

    #[error("basis index {index} out of range 1..={dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("leg shape {dims:?} inconsistent with matrix of dimension {dim}")]
    InvalidLegShape { dims: Vec<usize>, dim: usize },

    #[error("invalid permutation {0:?}")]
    InvalidPermutation(Vec<usize>),

    #[error("matrix not symmetric: defect {defect:e} exceeds {tolerance:e}")]
    NotSymmetric { defect: f64, tolerance: f64 },

    #[error("invalid deformation parameter q = {0}")]
    InvalidQ(f64),

    #[error("tolerance multiplier {0} must be finite and at least 1")]
    InvalidTolerance(f64),

    #[error("operation undefined at q = 0")]
    UnsupportedAtZero,

    #[error("spectrum mismatch: {0}")]
    SpectrumMismatch(String),

    #[error("degenerate sector at weight {weight}: eigenvalues {eigenvalues:?} leave a {dim}-dimensional joint eigenspace")]
    DegenerateSector {
        weight: Weight,
        eigenvalues: Vec<f64>,
        dim: usize,
    },

    #[error("sign ambiguity: overlap {overlap:e} with reference vector `{label}`")]
    SignAmbiguity { label: String, overlap: f64 },

    #[error("label sets of the two bases differ")]
    LabelMismatch,

    #[error("twist chain mismatch: {0}")]
    ChainMismatch(String),

    #[error("q-number ratio {{{k}}}/{{{m}}} has no finite nonzero limit at q = 0")]
    ZeroDenominatorOrder { k: f64, m: f64 },

    #[error("q-number ratio with zero denominator index")]
    ZeroDenominator,

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error("q -> 0 extrapolation did not converge (discrepancy {discrepancy:e})")]
    LimitNotConverged { discrepancy: f64 },
}
