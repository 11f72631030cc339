use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("empty interval {0}")]
    EmptyInterval(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix needs pivoting: zero pivot with nonzero residual")]
    NotFactorable,
    #[error("matrix is not positive definite")]
    NotPd,
    #[error("point is not in the interior of the dual cone")]
    NotInterior,
    #[error("nodes are not unisolvent: {0}")]
    NotUnisolvent(String),
    #[error("degree overflow: {0}")]
    DegreeOverflow(String),
    #[error("quadratic has no real root")]
    NoRealRoot,
    #[error("initial point fails the precondition: {0}")]
    InitNotValid(String),
    #[error("no convergence after {0} iterations")]
    MaxIters(usize),
    #[error("cone digest mismatch: certificate {cert}, cone {cone}")]
    DigestMismatch { cert: String, cone: String },
    #[error("missing parameter: {0}")]
    MissingParameter(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
