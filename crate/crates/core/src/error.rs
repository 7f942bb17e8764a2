use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric: |a[{i}][{j}] - a[{j}][{i}]| = {asymmetry:e}")]
    NonSymmetric { i: usize, j: usize, asymmetry: f64 },

    #[error("matrix has a non-finite entry at ({i}, {j})")]
    NonFinite { i: usize, j: usize },

    #[error("matrix must have at least one node")]
    Empty,

    #[error("symmetric eigensolver did not converge")]
    EigensolverFailure,

    #[error("size mismatch: expected {expected}, got {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("point at t = {t} leaves the cone of sorted spectra")]
    LeftCone { t: f64 },

    #[error("spectrum is not sorted in ascending order at position {index}")]
    Unsorted { index: usize },

    #[error("half-space system for facet {facet} is inconsistent (residual {residual:e})")]
    InconsistentSystem { facet: usize, residual: f64 },

    #[error("quadratic program did not converge: {0}")]
    SolverFailure(String),

    #[error("reference spectra are collinear and do not span a plane")]
    DegenerateTriangle,

    #[error("planar half-plane system is singular")]
    SingularSystem,

    #[error("exhaustive search over {subsets} subsets exceeds the budget of {budget}")]
    BudgetExceeded { subsets: u128, budget: u128 },

    #[error("no admissible reference subset satisfies the search constraints")]
    NoAdmissibleSubset,

    #[error("degenerate dataset: {0}")]
    DegenerateDataset(String),

    #[error("{n} nodes exceeds the exhaustive alignment limit of {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{file}:{line}: {message}")]
    Parse {
        file: String,
        line: u64,
        message: String,
    },

    #[error("no networks produced for the requested selection")]
    EmptySelection,

    #[error("schema error at {pointer}: {message}")]
    Schema { pointer: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
