use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("config error: {0}")]
    Config(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("SVD failed to converge")]
    SvdFailure,

    #[error("reference image has zero norm")]
    ZeroReference,

    #[error("image too small: {0}")]
    TooSmall(String),

    #[error("format error at byte {offset}: {message}")]
    Format { offset: usize, message: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
