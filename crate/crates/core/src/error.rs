use thiserror::Error;

/// Errors produced by the library.
///
/// `is_usage` separates caller mistakes (bad arguments, malformed files,
/// oversized requests) from failed preconditions of the mathematics.
#[derive(Debug, Error)]
pub enum Error {
    #[error("no inverse of 0")]
    NoInverse,

    #[error("modulus {0} is not an odd prime below 2^31")]
    BadPrime(u64),

    #[error("dimension {0} outside the supported range 1..=8")]
    BadDimension(usize),

    #[error("ambient mismatch: expected F_{expected_p}^{expected_dim}, got F_{got_p}^{got_dim}")]
    AmbientMismatch {
        expected_p: u32,
        expected_dim: usize,
        got_p: u32,
        got_dim: usize,
    },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("fixed-point iteration did not converge within {0} steps")]
    NonConvergence(usize),

    #[error("exhaustive mode over {size} points exceeds the limit {limit}; use sample mode")]
    OversizedExhaustive { size: u128, limit: u128 },

    #[error("parameter space needs a budget of {required}{} (given {budget})", if *.exact { "" } else { " or more" })]
    BudgetExceeded { required: u128, exact: bool, budget: u128 },

    #[error("parameter {name} = {value} outside its domain")]
    ParamDomain { name: String, value: u32 },

    #[error("unknown case id {0}")]
    UnknownCase(String),

    #[error("lambda map of {0} is not bijective")]
    NonBijectiveLambda(String),

    #[error("brace has not been verified")]
    Unverified,

    #[error(transparent)]
    Load(#[from] crate::io::LoadError),

    #[error("{0}")]
    Io(#[from] std::io::Error),

    #[error("usage: {0}")]
    Usage(String),
}

impl Error {
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::BadPrime(_)
                | Error::BadDimension(_)
                | Error::AmbientMismatch { .. }
                | Error::OversizedExhaustive { .. }
                | Error::BudgetExceeded { .. }
                | Error::ParamDomain { .. }
                | Error::UnknownCase(_)
                | Error::Load(_)
                | Error::Usage(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
