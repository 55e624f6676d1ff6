use thiserror::Error;

/// Errors raised while validating instances or running the solvers.
///
/// "No solution" outcomes are not errors: solvers return `Option`/`None`
/// for those and callers decide what an empty answer means.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed instance: {0}")]
    Shape(String),

    #[error("triangle inequality violated: d({a},{c}) > d({a},{b}) + d({b},{c})")]
    TriangleViolation { a: String, b: String, c: String },

    #[error("distance matrix is not symmetric at ({0}, {1})")]
    Asymmetric(String, String),

    #[error("distance from {0} to itself is nonzero")]
    NonzeroDiagonal(String),

    #[error("negative weight {value} on client {client}, color {color}")]
    NegativeWeight {
        client: String,
        color: usize,
        value: i64,
    },

    #[error("negative value in field `{0}`")]
    NegativeValue(&'static str),

    #[error("{0} is not prime")]
    NonPrimeField(u64),

    #[error("unknown facility index {0}")]
    UnknownFacility(usize),

    #[error("client {0} has no facility within the radius; purge it first")]
    UncoveredClient(usize),

    #[error("facility {facility} is farther than the radius from client {client}")]
    FacilityTooFar { facility: usize, client: usize },

    #[error("instance exceeds the brute-force size limit: {what} = {size} > {limit}")]
    SizeLimitExceeded {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("prime {prime} is too small: randomized failure bound needs p > {needed}")]
    PrimeTooSmall { prime: u64, needed: u64 },

    #[error("inconsistent guess: {0}")]
    InconsistentGuess(String),

    #[error("guess exhausts the remaining budget")]
    RejectedBudget,

    #[error("guess space exceeded the configured limit of {0} compositions")]
    GuessSpaceExceeded(u64),

    #[error("constraint kind does not match the requested solver: {0}")]
    ConstraintMismatch(&'static str),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("io: {0}")]
    Io(String),

    #[error("json: {0}")]
    Json(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
