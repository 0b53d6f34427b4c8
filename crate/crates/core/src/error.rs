use alloc::string::String;

/// Errors raised by the covariance-matrix calculus.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is not symmetric (asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("operands use different quadrature orderings")]
    OrderingMismatch,

    #[error("eigenvalues of the symplectic spectrum could not be paired (gap {0:e})")]
    PairingFailure(f64),

    #[error("argument outside the function domain: {0}")]
    DomainError(f64),

    #[error("covariance matrix violates the uncertainty relation (nu = {0})")]
    Unphysical(f64),

    #[error("channel has a nonzero displacement; eliminate it first")]
    NonzeroDisplacement,

    #[error("A + iB is not unitary (deviation {0:e})")]
    NotUnitary(f64),

    #[error("matrix is not symplectic-orthogonal (deviation {0:e})")]
    NotSymplecticOrthogonal(f64),

    #[error("noise blocks do not commute (commutator norm {0:e})")]
    NotCommuting(f64),

    #[error("noise matrix couples q and p quadratures (magnitude {0:e})")]
    OffDiagonalCoupling(f64),

    #[error("X is not a multiple of the identity (deviation {0:e})")]
    NonScalarX(f64),

    #[error("X and Y cannot be co-diagonalized by a symplectic-orthogonal pair: {0}")]
    NotCoDiagonalizable(String),

    #[error("one-mode block is not a valid channel: {0}")]
    UnphysicalBlock(String),

    #[error("no blocks to allocate power over")]
    EmptyBlocks,

    #[error("photon budget must be nonnegative, got {0}")]
    NegativeBudget(f64),

    #[error("parameter `{name}` out of range: {value}")]
    ParamOutOfRange { name: &'static str, value: f64 },

    #[error("memory matrix M is not symmetric")]
    NotSymmetricM,

    #[error("interference matrix spectrum outside [0, 1] (coupling {0})")]
    SpectrumOutOfRange(f64),

    #[error("eigensolver did not converge")]
    NoConvergence,
}

pub type Result<T> = core::result::Result<T, Error>;
