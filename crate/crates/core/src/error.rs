use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("kernel validation failed: {0}")]
    Kernel(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("alignment error: {0}")]
    Alignment(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid plane wave: {0}")]
    InvalidWave(String),
    #[error("symbol error: {0}")]
    Symbol(String),
    #[error("parse error at column {col}: {msg}")]
    Parse { col: usize, msg: String },
    #[error("type error: {0}")]
    Type(String),
    #[error("wrap error: {0}")]
    Wrap(String),
    #[error("degenerate deficit: {0}")]
    Degenerate(String),
    #[error("frequency exhaustion after {attempts} attempts: {diagnostics}")]
    FrequencyExhaustion { attempts: usize, diagnostics: String },
    #[error("decomposition error: {msg} (suggested delta_margin <= {suggested:.3})")]
    Decomposition { msg: String, suggested: f64 },
    #[error("frequency error: {0}")]
    Frequency(String),
    #[error("amplitude error: {0}")]
    Amplitude(String),
    #[error("immersion error: {0}")]
    Immersion(String),
    #[error("io error: {0}")]
    Io(String),
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
