use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A single-scatterer cross section is zero or negative, so the
    /// interference cosine involving it is undefined.
    #[error("degenerate scatterer: {0}")]
    DegenerateScatterer(String),

    /// No set of amplitudes reproduces the requested cosines or cross sections.
    #[error("not realizable: {detail} (minimal residual {residual:.6e} barn)")]
    NotRealizable { detail: String, residual: f64 },

    #[error(
        "unphysical absorption: sigma_a = {sigma_a:.6e} barn exceeds pi/k^2 = {limit:.6e} barn"
    )]
    UnphysicalAbsorption { sigma_a: f64, limit: f64 },

    #[error("unphysical scattering: {0}")]
    UnphysicalScattering(String),

    /// A composed slab operator is numerically zero (total absorption).
    #[error("degenerate slab operator: norm {0:.3e}")]
    DegenerateOperator(f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("value error: {0}")]
    Value(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Schema(_) => 2,
            Error::DegenerateScatterer(_)
            | Error::NotRealizable { .. }
            | Error::UnphysicalAbsorption { .. }
            | Error::UnphysicalScattering(_)
            | Error::DegenerateOperator(_)
            | Error::InvalidInput(_)
            | Error::Value(_) => 3,
            Error::Numerical(_) => 4,
            Error::Io(_) => 1,
        }
    }
}
