use thiserror::Error;

/// Every failure the simulator can report, grouped by category.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("normalization error: spinor norm is {norm}, expected 1")]
    Normalization { norm: f64 },
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("ill-conditioned: {0}")]
    IllConditioned(String),
    #[error("resolution error: {0}")]
    Resolution(String),
    #[error("no lattice: {0}")]
    NoLattice(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn category(&self) -> &'static str {
        match self {
            Error::Config(_) => "config",
            Error::Domain(_) => "domain",
            Error::Shape(_) => "shape",
            Error::Normalization { .. } => "normalization",
            Error::Numerical(_) => "numerical",
            Error::IllConditioned(_) => "ill-conditioned",
            Error::Resolution(_) => "resolution",
            Error::NoLattice(_) => "no-lattice",
            Error::Io(_) => "io",
        }
    }

    /// Process exit status for the CLI. Zero is reserved for success.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Domain(_) => 3,
            Error::Shape(_) => 4,
            Error::Normalization { .. } => 5,
            Error::Numerical(_) => 6,
            Error::IllConditioned(_) => 7,
            Error::Resolution(_) => 8,
            Error::NoLattice(_) => 9,
            Error::Io(_) => 10,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
