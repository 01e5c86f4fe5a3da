use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("graph has {n} vertices, brute-force oracle is capped at {cap}")]
    SizeCap { n: usize, cap: usize },

    #[error("eigendecomposition failed for matrix of order {order}")]
    Numerical { order: usize },

    #[error("basis of size {size} exceeds the hard cap of {cap}")]
    ResourceGuard { size: usize, cap: usize },

    #[error("time limit reached before any ADMM iterate was produced")]
    TimeLimit,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Config(_) | Error::Input(_) | Error::Io(_) | Error::Json(_) => 2,
            Error::Numerical { .. } | Error::TimeLimit => 3,
            Error::SizeCap { .. } | Error::ResourceGuard { .. } => 4,
        }
    }
}
