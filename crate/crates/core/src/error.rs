use std::path::PathBuf;

use thiserror::Error;

use crate::oracle::CollisionWitness;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A builder produced a matrix that the exhaustive oracle rejected.
    #[error("unverified construction ({what}): {witness}")]
    UnverifiedConstruction {
        what: String,
        witness: Box<CollisionWitness>,
    },

    /// A structural condition on a generated matrix failed.
    #[error("construction failed: {0}")]
    Construction(String),

    #[error("inconsistent outcome: {0}")]
    InconsistentOutcome(String),

    #[error("{}:{line}: {msg}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("invalid scheme metadata: {0}")]
    Validation(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn inconsistent(msg: impl Into<String>) -> Self {
        Error::InconsistentOutcome(msg.into())
    }
}
