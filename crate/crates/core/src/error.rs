use thiserror::Error;

#[derive(Debug, Error)]
pub enum NfError {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("invalid polar point: {0}")]
    InvalidPoint(String),
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("operation requires a uniform linear array")]
    NotUla,
    #[error("codebook is empty")]
    EmptyCodebook,
    #[error("channel vector is zero")]
    ZeroChannel,
    #[error("channel direction is not unit norm (norm = {0})")]
    NonUnitChannel(f64),
    #[error("config error: {0}")]
    Config(String),
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, NfError>;
