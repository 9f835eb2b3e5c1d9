//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("phase space dimension must be even and positive, got {0}")]
    OddDimension(usize),

    #[error("matrix is not symplectic: residual {residual:.3e} exceeds {tol:.3e}")]
    NotSymplectic { residual: f64, tol: f64 },

    #[error("Cayley transform out of domain: I - JM/2 is numerically singular")]
    CayleyOutOfDomain,

    #[error("pairing |omega(w, v)| = {omega:.6} is not 1 within {tol:.3e}")]
    DegeneratePairing { omega: f64, tol: f64 },

    #[error("rank deficiency while {context}")]
    RankDeficient { context: &'static str },

    #[error("operation not supported for this body representation: {0}")]
    Representation(&'static str),

    #[error("{what} exceeds the supported size ({got} > {limit})")]
    SizeLimit {
        what: &'static str,
        got: usize,
        limit: usize,
    },

    #[error("origin is not strictly interior to the body")]
    OriginNotInterior,

    #[error("body is not centrally symmetric")]
    NotSymmetric,

    #[error("H-polytope is unbounded")]
    Unbounded,

    #[error("linear program is infeasible")]
    LpInfeasible,

    #[error("linear program is unbounded")]
    LpUnbounded,

    #[error("linear program did not terminate within the iteration cap")]
    LpStalled,

    #[error("gauge is not differentiable for this representation; smooth it first")]
    NonSmooth,

    #[error("no closed characteristic found: all {tried} shooting starts failed")]
    ShootingFailed { tried: usize },

    #[error("orbit is not closed: gap {residual:.3e} exceeds tolerance {tol:.3e}")]
    OpenLoop { residual: f64, tol: f64 },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}
