use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the region where the formula is defined or
    /// converges. The message names the violated condition.
    #[error("{0}")]
    Domain(String),

    #[error("pole: {0}")]
    Pole(String),

    /// Two routes that must agree did not, which signals too small an order
    /// or too little precision.
    #[error("consistency check failed: {0}")]
    Consistency(String),

    /// The requested accuracy was not reached before the order cap.
    #[error("no convergence at order cap {cap}: residual {residual}")]
    NotConverged { cap: usize, residual: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Short machine-readable tag for error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Pole(_) => "pole",
            Error::Consistency(_) => "consistency",
            Error::NotConverged { .. } => "not_converged",
            Error::Io { .. } => "io",
            Error::Parse(_) => "parse",
        }
    }
}
