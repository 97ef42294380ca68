use thiserror::Error;

/// Errors raised by the numeric routines.
///
/// Every variant carries a stable kebab-case [`code`](Error::code) that is
/// surfaced in CLI diagnostics and through the C ABI.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("asymptotic class constant overflowed")]
    ClassOverflow,
    #[error("invalid asymptotic class: {0}")]
    InvalidClass(String),
    #[error("invalid parameter for family `{family}`: {reason}")]
    InvalidFamilyParam { family: String, reason: String },
    #[error("unknown sequence family `{0}`")]
    UnknownFamily(String),
    #[error("index {index} out of range (table length {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("n*a_n does not settle over the probe window (last relative drift {drift:.3})")]
    ChiNotConvergent { drift: f64 },
    #[error("estimated chi = {0:e} is effectively zero")]
    ChiZero(f64),
    #[error("weight is not strictly positive at n = {0}")]
    WeightNotPositive(usize),
    #[error("weight is not decreasing at n = {0}")]
    WeightNotDecreasing(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("alpha = Re(1/lambda) is undefined at lambda = 0")]
    AlphaUndefinedAtZero,
    #[error("lambda coincides with a_{0}")]
    LambdaInS(usize),
    #[error("lambda is not a diagonal value a_k for k <= {0}")]
    NotAnEigencandidate(usize),
    #[error("lambda repeats on the diagonal (a_{first} = a_{repeat})")]
    RepeatedDiagonalUnsupported { first: usize, repeat: usize },
    #[error("0 is never an eigenvalue of the adjoint")]
    ZeroNotAdjointEigenvalue,
    #[error("lambda lies in the closure of S but not in S")]
    ClosureBoundaryUnsupported,
    #[error("the resolvent is undefined at lambda = 0")]
    ResolventUndefinedAtZero,
    #[error("section dimension {n} exceeds the dense cap {cap}")]
    SectionTooLarge { n: usize, cap: usize },
    #[error("weights are not ordered: r_{0} > t_{0}")]
    WeightsNotOrdered(usize),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable machine-readable identifier.
    pub fn code(&self) -> &'static str {
        match self {
            Error::ClassOverflow => "class-overflow",
            Error::InvalidClass(_) => "invalid-class",
            Error::InvalidFamilyParam { .. } => "invalid-family-param",
            Error::UnknownFamily(_) => "unknown-family",
            Error::IndexOutOfRange { .. } => "index-out-of-range",
            Error::ChiNotConvergent { .. } => "chi-not-convergent",
            Error::ChiZero(_) => "chi-zero",
            Error::WeightNotPositive(_) => "weight-not-positive",
            Error::WeightNotDecreasing(_) => "weight-not-decreasing",
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::AlphaUndefinedAtZero => "alpha-undefined-at-zero",
            Error::LambdaInS(_) => "lambda-in-S",
            Error::NotAnEigencandidate(_) => "not-an-eigencandidate",
            Error::RepeatedDiagonalUnsupported { .. } => "repeated-diagonal-unsupported",
            Error::ZeroNotAdjointEigenvalue => "zero-not-adjoint-eigenvalue",
            Error::ClosureBoundaryUnsupported => "closure-boundary-unsupported",
            Error::ResolventUndefinedAtZero => "resolvent-undefined-at-zero",
            Error::SectionTooLarge { .. } => "section-too-large",
            Error::WeightsNotOrdered(_) => "weights-not-ordered",
            Error::InvalidGrid(_) => "invalid-grid",
            Error::InvalidInput(_) => "invalid-input",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
