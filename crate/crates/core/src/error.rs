use thiserror::Error;

use crate::poly::AlgebraSpec;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("algebra mismatch: {0} vs {1}")]
    AlgebraMismatch(AlgebraSpec, AlgebraSpec),
    #[error("matrix size mismatch: {0}")]
    SizeMismatch(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("operation requires the torus algebra")]
    NotTorus,
    #[error("operation requires the free polynomial algebra")]
    NotFreePoly,
    #[error("homogeneous bases are not defined on the torus")]
    HomogeneousTorus,
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("not hermitian: {0}")]
    NotHermitian(String),
    #[error("input must be homogeneous of even degree: {0}")]
    NotHomogeneousEven(String),
    #[error("degree {degree} exceeds twice the truncation level {level}")]
    DegreeOverflow { degree: u32, level: u32 },
    #[error("malformed SDP problem: {0}")]
    MalformedSdp(String),
    #[error("monomial {0} lies outside the basis")]
    OutsideBasis(String),
    #[error("level {level} too small, need at least {needed}")]
    LevelTooSmall { level: u32, needed: u32 },
    #[error("missing moment value for monomial {0}")]
    MissingMoment(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("schema error: {0}")]
    Schema(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
