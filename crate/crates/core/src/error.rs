use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("S({a},{b},{c}) violates {reason}")]
    InvalidParams {
        a: u32,
        b: u32,
        c: u32,
        reason: &'static str,
    },
    #[error(
        "in-stratum degree {lateral} cannot be wired as a circulant on {stratum_size} vertices"
    )]
    UnrealizableInStratumDegree { lateral: u32, stratum_size: u64 },
    #[error("{0}")]
    InvalidArgument(&'static str),
    #[error("continued-fraction denominator {magnitude:e} at level {level} is within the pole threshold")]
    PoleProximity { level: usize, magnitude: f64 },
    #[error("atom search failed near x = {near}")]
    AtomSearchFailure { near: f64 },
    #[error("tridiagonal eigensolver did not converge for order {order}")]
    EigenFailure { order: usize },
    #[error("quadrature error estimate {estimate:e} still above tolerance at order {order}")]
    QuadratureNonConvergence { order: usize, estimate: f64 },
    #[error("measure reaches x = {sup} > 0, so e^(tH) is not a stochastic evolution")]
    UnsupportedMeasure { sup: f64 },
    #[error("graph has {edges} edges, above the cap of {cap}")]
    GraphTooLarge { edges: usize, cap: usize },
    #[error("closed walks of length {m} see the boundary of a depth-{depth} graph")]
    DepthTooShallow { m: usize, depth: usize },
    #[error("closed-walk count of length {m} overflows 64 bits")]
    Overflow { m: usize },
    #[error("time {t} lies beyond the light-cone bound {bound}")]
    TimeOutsideLightCone { t: f64, bound: f64 },
    #[error("successive maxima at t = {t} are closer than 4 samples")]
    TooSparse { t: f64 },
    #[error("fit window holds {found} points, need at least 8")]
    InsufficientPoints { found: usize },
    #[error("value {value} at t = {t} is not positive")]
    NonPositiveValue { t: f64, value: f64 },
    #[error("trace has no maximum in range")]
    NoMaximumInRange,
}

impl Error {
    /// Stable variant name, used by the command-line driver in messages.
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidParams { .. } => ErrorKind::InvalidParams,
            Error::UnrealizableInStratumDegree { .. } => ErrorKind::UnrealizableInStratumDegree,
            Error::InvalidArgument(_) => ErrorKind::InvalidArgument,
            Error::PoleProximity { .. } => ErrorKind::PoleProximity,
            Error::AtomSearchFailure { .. } => ErrorKind::AtomSearchFailure,
            Error::EigenFailure { .. } => ErrorKind::EigenFailure,
            Error::QuadratureNonConvergence { .. } => ErrorKind::QuadratureNonConvergence,
            Error::UnsupportedMeasure { .. } => ErrorKind::UnsupportedMeasure,
            Error::GraphTooLarge { .. } => ErrorKind::GraphTooLarge,
            Error::DepthTooShallow { .. } => ErrorKind::DepthTooShallow,
            Error::Overflow { .. } => ErrorKind::Overflow,
            Error::TimeOutsideLightCone { .. } => ErrorKind::TimeOutsideLightCone,
            Error::TooSparse { .. } => ErrorKind::TooSparse,
            Error::InsufficientPoints { .. } => ErrorKind::InsufficientPoints,
            Error::NonPositiveValue { .. } => ErrorKind::NonPositiveValue,
            Error::NoMaximumInRange => ErrorKind::NoMaximumInRange,
        }
    }

    /// True for failures caused by the request rather than by the numerics.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidParams { .. }
                | Error::UnrealizableInStratumDegree { .. }
                | Error::InvalidArgument(_)
                | Error::GraphTooLarge { .. }
                | Error::DepthTooShallow { .. }
                | Error::TimeOutsideLightCone { .. }
                | Error::UnsupportedMeasure { .. }
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    InvalidParams,
    UnrealizableInStratumDegree,
    InvalidArgument,
    PoleProximity,
    AtomSearchFailure,
    EigenFailure,
    QuadratureNonConvergence,
    UnsupportedMeasure,
    GraphTooLarge,
    DepthTooShallow,
    Overflow,
    TimeOutsideLightCone,
    TooSparse,
    InsufficientPoints,
    NonPositiveValue,
    NoMaximumInRange,
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}
