use std::fmt;

use thiserror::Error;

use crate::ComplexScalar;

/// Which side of an identity an evaluation failure came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Lhs,
    Rhs,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Lhs => f.write_str("lhs"),
            Side::Rhs => f.write_str("rhs"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum Error {
    #[error("base must satisfy 0 < |q| < 1, got {0}")]
    InvalidBase(ComplexScalar),

    #[error("pole hit: {0}")]
    PoleHit(String),

    #[error("budget exhausted: {0}")]
    Budget(String),

    #[error("outside the convergence region: {0}")]
    DivergentRegion(String),

    #[error("non-finite intermediate value: {0}")]
    Overflow(String),

    #[error("domain violation for {identity}: {condition}")]
    DomainViolation { identity: String, condition: String },

    #[error("unknown identity '{0}'")]
    UnknownIdentity(String),

    #[error("sampler exhausted for {identity} after {attempts} rejected draws")]
    Exhausted { identity: String, attempts: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{side}: {source}")]
    OnSide {
        side: Side,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn on(self, side: Side) -> Error {
        Error::OnSide {
            side,
            source: Box::new(self),
        }
    }

    /// The error with any side tag stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::OnSide { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
