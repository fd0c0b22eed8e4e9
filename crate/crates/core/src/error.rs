use thiserror::Error;

/// Every failure mode surfaced by the library.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("matrix entry at ({row}, {col}) is not an integer")]
    NonIntegerInput { row: usize, col: usize },

    #[error("expected a square matrix, got {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is singular or not of full rank")]
    SingularMatrix,

    #[error("operation requires an exact (B/sqrt(c)) form of the generator")]
    NoExactForm,

    #[error("enumeration exceeds the configured cap ({what}: {count} > {cap}); lower the radius or cutoff")]
    RadiusTooLarge { what: &'static str, count: u64, cap: u64 },

    #[error("symplectic Gram entry ({row}, {col}) = {value} is not within tolerance of an integer")]
    NonIntegralSymplecticGram { row: usize, col: usize, value: f64 },

    #[error("logical dimension is not a positive integer (|det M| = {det_m}, |det A| = {det_a})")]
    NonIntegerLogicalDim { det_m: f64, det_a: String },

    #[error("vector is not in the lattice")]
    NotInLattice,

    #[error("vector is not in the symplectic dual lattice")]
    NotInDualLattice,

    #[error("code is not CSS")]
    NotCss,

    #[error("code encodes no logical information (d = 1); no nontrivial logical operator exists")]
    TrivialCode,

    #[error("seed lattice is not symplectically self-dual")]
    NotSelfDual,

    #[error("odd scale factor {0} requires the qudit flag")]
    OddScale(u64),

    #[error("invalid qubit stabilizer code: {0}")]
    InvalidQubitCode(String),

    #[error("completion finished with rank {rank}, expected {expected}")]
    InconsistentInput { rank: usize, expected: usize },

    #[error("invalid glue: {0}")]
    InvalidGlue(String),

    #[error("glued determinant ratio is not an integer: {0}")]
    NonIntegerDeterminantRatio(String),

    #[error("second tensor factor has a non-integral Gram matrix")]
    NonIntegralG2,

    #[error("theta truncation bound {bound:e} exceeds tolerance {tol:e}; raise the cutoff")]
    CutoffInsufficient { bound: f64, tol: f64 },

    #[error("stabilizer group too large to enumerate (2^{0} elements)")]
    GroupTooLarge(usize),

    #[error("noise standard deviation {0} is below the MLD floor; use minimum-energy decoding")]
    DegenerateSigma(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("file format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
