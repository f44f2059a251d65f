use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    #[error("pole of {func} at {at}")]
    Pole { func: &'static str, at: f64 },

    #[error("{func} failed to converge: {detail}")]
    Convergence { func: &'static str, detail: String },

    #[error("{func} is outside its regime of validity: {detail}")]
    OutOfRegime { func: &'static str, detail: String },

    #[error("inverse factorial coefficient c_{j} unavailable for nu={nu}, p={p}")]
    UnsupportedDepth { j: usize, nu: f64, p: u32 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("overflow in {func}: {detail}")]
    Overflow { func: &'static str, detail: String },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain { func, detail: detail.into() }
    }

    pub(crate) fn convergence(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Convergence { func, detail: detail.into() }
    }

    pub(crate) fn regime(func: &'static str, detail: impl Into<String>) -> Self {
        Error::OutOfRegime { func, detail: detail.into() }
    }

    /// Process exit code used by the command line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain { .. } | Error::Pole { .. } | Error::OutOfRegime { .. } => 2,
            Error::UnsupportedDepth { .. } | Error::Parse(_) => 2,
            Error::Convergence { .. } | Error::Overflow { .. } | Error::Io(_) => 3,
            Error::InsufficientData(_) => 4,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
