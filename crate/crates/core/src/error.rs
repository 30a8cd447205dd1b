use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid multiplier: non-finite value {value} at wavevector {xi:?}")]
    InvalidMultiplier { xi: [f64; 2], value: String },

    #[error("symbol domain error: {0}")]
    SymbolDomain(String),

    #[error("degenerate symbol at node {node}, wavevector {xi:?}: radicand {radicand:e}")]
    DegenerateSymbol {
        node: usize,
        xi: [f64; 2],
        radicand: f64,
    },

    #[error("surface too rough: no admissible flattening parameter above {min_delta:e} (min d_z rho = {min_rho_z:.4})")]
    SurfaceTooRough { min_delta: f64, min_rho_z: f64 },

    #[error(
        "ill-conditioned discretization: residual {residual:e} after {iterations} iterations (condition estimate {condition:e})"
    )]
    IllConditioned {
        residual: f64,
        iterations: usize,
        condition: f64,
    },

    #[error("symmetrizer undefined: Taylor coefficient min {min_a:e} at node {node}")]
    TaylorSignViolated { min_a: f64, node: usize },

    #[error("blow-up detected at t = {t}")]
    BlowUp { t: f64 },

    #[error("time regression: sample at t = {t} after t = {last}")]
    TimeRegression { t: f64, last: f64 },

    #[error("unknown preset: {0}")]
    UnknownPreset(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
