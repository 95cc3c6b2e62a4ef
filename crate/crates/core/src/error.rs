use thiserror::Error;

/// Errors raised by the library.
///
/// The CLI maps these onto exit codes: input problems are configuration
/// errors, [`Error::WorkLimit`] is a resource breach, and
/// [`Error::Invariant`] flags a failed internal check.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("point {0} lies outside the domain")]
    OutsideDomain(String),

    #[error("accumulator overflow after {terms} terms")]
    Overflow { terms: u64 },

    #[error("work limit exceeded: {requested} candidates requested, limit is {limit}")]
    WorkLimit { requested: u128, limit: u128 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("fibering failed: coordinates stay linearly dependent for D in {tried:?}")]
    FiberingFailed { tried: Vec<u32> },

    #[error("no Dirichlet witness at t = {t} (C = {constant}, value bound {value_bound:e}, height bound {height_bound})")]
    NoWitness {
        t: u32,
        constant: f64,
        value_bound: f64,
        height_bound: u64,
    },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
