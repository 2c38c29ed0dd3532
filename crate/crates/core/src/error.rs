use thiserror::Error;

/// Errors raised by the toolkit.
///
/// Parameter errors are caller mistakes; resource errors mean the request is
/// well formed but exceeds a configured enumeration or size limit.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("modulus must be at least {min}, got {n}")]
    ModulusTooSmall { n: u64, min: u64 },
    #[error("probability must lie in [0, 1], got {0}")]
    InvalidProbability(String),
    #[error("malformed probability {0:?}; expected NUM/DEN or a decimal")]
    MalformedProbability(String),
    #[error("modulus {0} must be odd")]
    EvenModulus(u64),
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("residue {k} must be nonzero modulo {n}")]
    ZeroResidue { k: u64, n: u64 },
    #[error("sum targets must differ, got i = j = {0}")]
    EqualTargets(u64),
    #[error("residue {value} out of range for modulus {n}")]
    ResidueOutOfRange { value: u64, n: u64 },
    #[error("invalid regime parameters: {0}")]
    Regime(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("exhaustive enumeration over n = {n} exceeds the limit of {limit}")]
    EnumerationLimit { n: u64, limit: u64 },
    #[error("internal identity violated: {0}")]
    Invariant(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Resource-limit errors are distinguished so front ends can map them to
    /// their own exit status.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::EnumerationLimit { .. })
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
