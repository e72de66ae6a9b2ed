use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A function argument lies outside its domain.
    Domain { what: &'static str, value: f64 },
    /// A constructor rejected a field value.
    Invalid {
        field: &'static str,
        reason: &'static str,
    },
    /// Arguments that are individually fine but cannot be combined.
    Usage(&'static str),
    /// An iterative routine failed to produce an answer.
    Numerical {
        routine: &'static str,
        detail: String,
    },
}

impl Error {
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical { .. })
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { what, value } => write!(f, "{what} out of domain: {value}"),
            Error::Invalid { field, reason } => write!(f, "invalid {field}: {reason}"),
            Error::Usage(msg) => write!(f, "usage error: {msg}"),
            Error::Numerical { routine, detail } => write!(f, "{routine} failed: {detail}"),
        }
    }
}

impl core::error::Error for Error {}
