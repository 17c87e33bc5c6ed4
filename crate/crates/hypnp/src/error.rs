use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("point {0:?} lies outside the cone over the Newton polytope")]
    NotInCone(Vec<i64>),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("resource budget exceeded: {0}")]
    Resource(String),

    #[error("insufficient p-adic precision: {reason} (try precision >= {required_pi_digits} in pi-adic digits)")]
    Precision {
        reason: String,
        required_pi_digits: u64,
    },

    #[error("elements belong to different p-adic rings")]
    RingMismatch,

    #[error("internal geometry error: {0}")]
    Geometry(String),

    #[error("sign convention check failed: {0}")]
    Convention(String),

    #[error("Newton polygon dips below the Hodge polygon: {0}")]
    NewtonBelowHodge(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Precision and budget failures can be cured by re-running with larger
    /// limits; everything else is a domain or input problem.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource(_) | Error::Precision { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
