use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Error type shared across the toolchain.
///
/// `Validation` covers bad user input (malformed files, infeasible configs);
/// `Internal` covers broken invariants that indicate a bug rather than bad
/// input. The CLI maps these to exit codes 1 and 2 respectively.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("protocol file error: {0}")]
    ProtocolFormat(String),

    #[error("protocol is not triorthogonal: {0}")]
    NotTriorthogonal(String),

    #[error("code spec error: {0}")]
    CodeSpec(String),

    #[error("compilation error: {0}")]
    Compile(String),

    #[error("simulation error: {0}")]
    Simulation(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// True for errors caused by bad input rather than internal bugs.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Internal(_))
    }
}
