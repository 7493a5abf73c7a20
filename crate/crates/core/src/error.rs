use thiserror::Error;

use crate::incidence::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input text or arguments that do not describe a valid object.
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("not a projective plane: {0}")]
    NotAPlane(ValidationReport),

    #[error("unsupported field order {0} (supported: 2, 3, 4, 5, 7, 8, 9, 11)")]
    UnsupportedOrder(u32),

    /// A search or enumeration would exceed its configured budget.
    #[error("budget exceeded: {0}")]
    Budget(String),

    /// The requested computation is outside the feasible enumeration volume.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// An internal consistency check failed; this always indicates a bug or
    /// a counterexample, never a rounding issue.
    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Invariant(_) => 1,
            Error::Budget(_) | Error::Infeasible(_) => 2,
            Error::Malformed(_)
            | Error::InvalidArgument(_)
            | Error::NotAPlane(_)
            | Error::UnsupportedOrder(_)
            | Error::Io(_) => 3,
        }
    }
}
