use thiserror::Error;

/// Errors produced by the solver library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    /// The iterate reached a state where a threshold is undefined: zero
    /// residual, or every row gradient vanishes.
    #[error("degenerate state: {0}")]
    DegenerateState(&'static str),

    #[error("greedy index set is empty")]
    EmptySet,

    #[error("every candidate row has a vanishing gradient")]
    AllWeightsZero,

    #[error("projection row has a vanishing gradient")]
    ZeroGradient,

    #[error("factorization failed: {0}")]
    FactorizationFailure(&'static str),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("method {0} requires a GLM problem")]
    RequiresGlm(&'static str),

    #[error("tangential cone constant must be below 1/2, got {0}")]
    InvalidEta(f64),

    /// A block convergence theorem's positivity hypothesis fails at this
    /// state; the factor does not apply.
    #[error("theorem hypothesis violated: alpha/beta = {0}")]
    HypothesisViolated(f64),

    #[error("no valid ratio sampled for rows {0:?}")]
    DegenerateRegion(Vec<usize>),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
