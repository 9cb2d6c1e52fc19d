use thiserror::Error;

/// Failure modes of the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid domain parameter: {0}")]
    DomainParameter(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("non-finite integrand at ({x}, {y})")]
    Integration { x: f64, y: f64 },
    #[error("invalid path: {0}")]
    Path(String),
    #[error("field is not a gradient: compatibility residual {residual:.3e}")]
    Compatibility { residual: f64 },
    #[error("exp-polynomial operands have different kappa")]
    KappaMismatch,
    #[error("operation requires a real kappa")]
    ComplexKappa,
    #[error("degenerate generating pair: {0}")]
    DegeneratePair(String),
    #[error("conformal map not admissible: {0}")]
    ConformalMap(String),
    #[error("not separable: {0}")]
    Separability(String),
    #[error("positivity failure near ({x}, {y})")]
    Positivity { x: f64, y: f64 },
    #[error("particular solution residual {residual:.3e} exceeds tolerance")]
    NotASolution { residual: f64 },
    #[error("underdetermined system: {rows} rows for {cols} unknowns")]
    Underdetermined { rows: usize, cols: usize },
    #[error("ill-conditioned collocation matrix (condition estimate {estimate:.3e})")]
    IllConditioned { estimate: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
