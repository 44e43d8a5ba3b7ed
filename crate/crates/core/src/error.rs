use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("epsilon must be finite and strictly positive, got {0}")]
    InvalidEpsilon(f64),

    #[error("sample is not finite: t={t}, x={x}")]
    NonFiniteSample { t: f64, x: f64 },

    #[error("timestamp {t} is not strictly after previous timestamp {previous}")]
    NonMonotonicTimestamp { previous: f64, t: f64 },

    #[error("model is empty")]
    EmptyModel,

    #[error("timestamp {t} precedes the first stored timestamp {first}")]
    TimestampBeforeHistory { t: f64, first: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("need at least {required} samples, got {got}")]
    TooFewSamples { required: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid coordinate: lat={lat}, lon={lon}")]
    InvalidCoordinate { lat: f64, lon: f64 },

    #[error("index range [{first}, {last}] out of bounds for trace of length {len}")]
    IndexOutOfRange { first: usize, last: usize, len: usize },

    #[error("trace path is degenerate: {0}")]
    DegeneratePath(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Input that could not be decoded, as opposed to well-formed input that
    /// violates a domain rule.
    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse { .. } | Error::Io(_))
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
