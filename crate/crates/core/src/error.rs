use thiserror::Error;

/// Errors raised across the forward, reduced-order and imaging stages.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LslError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// `lambda` lies too close to a discrete eigenvalue `-mu` of the forward operator.
    #[error("lambda = {lambda} is within {distance:.3e} of a discrete resonance")]
    ResonanceProximity { lambda: f64, distance: f64 },

    /// `lambda` is (numerically) a pole of the analytic background transfer function.
    #[error("lambda = {lambda} is a pole of the background transfer function (k = {k})")]
    Pole { lambda: f64, k: u64 },

    #[error("mass matrix is indefinite: eigenvalue {eigenvalue:.3e} below -{tolerance:.3e}")]
    DegenerateMass { eigenvalue: f64, tolerance: f64 },

    #[error("degenerate source: b^T M^-1 b = {value:.3e}")]
    DegenerateSource { value: f64 },

    #[error("lambda = {lambda} is a resonance of the reduced-order model")]
    RomResonance { lambda: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("sample points do not align: {0}")]
    Alignment(String),

    #[error("degenerate imaging system: {0}")]
    DegenerateSystem(String),

    #[error("failed to parse dataset: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for LslError {
    fn from(err: std::io::Error) -> Self {
        LslError::Io(err.to_string())
    }
}

pub type Result<T, E = LslError> = std::result::Result<T, E>;
