use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A dyadic object is finer than the grid it is embedded into, or two
    /// grids disagree.
    #[error("resolution error: {0}")]
    Resolution(String),

    /// A parameter lies outside the range where the construction is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// The input has no meaningful decomposition (typically `f = 0`).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("configuration error: {0}")]
    Config(String),

    /// A constant-free inequality failed numerically.
    #[error("{what} violated: lhs = {lhs:e}, rhs = {rhs:e}")]
    Violation { what: String, lhs: f64, rhs: f64 },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn violation(what: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Error::Violation {
            what: what.into(),
            lhs,
            rhs,
        }
    }

    /// Process exit code used by the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Violation { .. } => 1,
            Error::Resolution(_)
            | Error::Domain(_)
            | Error::Degenerate(_)
            | Error::Precondition(_)
            | Error::Config(_) => 2,
            Error::Io(_) | Error::Json(_) => 3,
        }
    }
}
