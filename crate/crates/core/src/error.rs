use thiserror::Error;

/// Errors raised by the geometric and metric operations.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("point is not in the interior of the domain (margin {margin:e})")]
    NotInterior { margin: f64 },
    #[error("direction vector is zero")]
    ZeroDirection,
    #[error("point is not on the boundary (distance estimate {distance:e})")]
    NotBoundary { distance: f64 },
    #[error("point lies outside the model domain: {0}")]
    OutOfDomain(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is numerically singular (reciprocal condition {rcond:e})")]
    SingularMatrix { rcond: f64 },
    #[error("invalid domain specification: {0}")]
    InvalidSpec(String),
    #[error("argument outside the admissible range: {0}")]
    DomainError(String),
    #[error("time grid must be strictly increasing")]
    GridError,
    #[error("rays are indistinguishable on the grid (distance {distance:e})")]
    DegenerateRays { distance: f64 },
    #[error("domain fails the normalization probes: {0}")]
    NormalizationError(String),
    #[error("domain does not meet the clipping ball of radius {radius}")]
    EmptyClip { radius: f64 },
    #[error("closest boundary point is not locally unique (gap {gap:e})")]
    DegenerateClosestPoint { gap: f64 },
    #[error("hypothesis check failed: {0}")]
    HypothesisError(String),
    #[error("inward normal undefined at a non-smooth boundary point")]
    NormalUndefined,
    #[error("direction is not complex-tangential (|<v,n>| = {inner:e})")]
    NotTangential { inner: f64 },
    #[error("domain is unbounded within the clip radius")]
    UnboundedDomain,
    #[error("ray escapes the clip radius without meeting the boundary")]
    Unbounded,
    #[error("internal consistency violation: {0}")]
    Internal(String),
}

impl Error {
    /// `true` for errors caused by bad input (points, specs, arguments) as
    /// opposed to numerical breakdown.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::SingularMatrix { .. }
                | Error::DegenerateClosestPoint { .. }
                | Error::Unbounded
                | Error::UnboundedDomain
                | Error::Internal(_)
                | Error::DegenerateRays { .. }
        )
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotInterior { .. } => "NotInterior",
            Error::ZeroDirection => "ZeroDirection",
            Error::NotBoundary { .. } => "NotBoundary",
            Error::OutOfDomain(_) => "OutOfDomain",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::SingularMatrix { .. } => "SingularMatrix",
            Error::InvalidSpec(_) => "InvalidSpec",
            Error::DomainError(_) => "DomainError",
            Error::GridError => "GridError",
            Error::DegenerateRays { .. } => "DegenerateRays",
            Error::NormalizationError(_) => "NormalizationError",
            Error::EmptyClip { .. } => "EmptyClip",
            Error::DegenerateClosestPoint { .. } => "DegenerateClosestPoint",
            Error::HypothesisError(_) => "HypothesisError",
            Error::NormalUndefined => "NormalUndefined",
            Error::NotTangential { .. } => "NotTangential",
            Error::UnboundedDomain => "UnboundedDomain",
            Error::Unbounded => "Unbounded",
            Error::Internal(_) => "Internal",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
