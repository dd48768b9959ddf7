use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate target: {0}")]
    DegenerateTarget(String),
    #[error("quadrilateral closure failed on every branch: {0}")]
    InfeasibleClosure(String),
    #[error("invalid CORPSE windings: {0}")]
    InvalidWindings(String),
    #[error("decomposition does not reproduce the target: {0}")]
    Reconstruction(String),
    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("invalid pulse: {0}")]
    InvalidPulse(String),
    #[error("matrix is not unitary: {0}")]
    NotUnitary(String),
    #[error("insufficient data for a scaling fit: {0}")]
    InsufficientData(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
