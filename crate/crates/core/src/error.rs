use alloc::string::String;
use alloc::vec::Vec;
use thiserror::Error;

/// Why a numeric evaluation was rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    DivisionByZero,
    LogOfNonPositive,
    SqrtOfNegative,
    NonFinite,
}

impl core::fmt::Display for DomainKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let s = match self {
            DomainKind::DivisionByZero => "division by zero",
            DomainKind::LogOfNonPositive => "logarithm of a non-positive value",
            DomainKind::SqrtOfNegative => "square root of a negative value",
            DomainKind::NonFinite => "non-finite value",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[non_exhaustive]
pub enum Error {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("{kind} in `{subexpr}`")]
    Domain { kind: DomainKind, subexpr: String },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("variance mismatch: {0}")]
    VarianceMismatch(String),
    #[error("operands live on different charts")]
    ChartMismatch,
    #[error("operation needs a tensorial field, got a bare coordinate gradient")]
    NonTensorial,
    #[error("singular matrix: |det| = {det:e} at {point:?}")]
    SingularMetric { det: f64, point: Vec<f64> },
    #[error("metric is not positive definite at {point:?}")]
    NotPositiveDefinite { point: Vec<f64> },
    #[error("3-form is not closed: max |dH| = {0:e}")]
    NotClosed(f64),
    #[error("not antisymmetric: {0}")]
    NotAntisymmetric(String),
    #[error("cyclic sum does not vanish: max residual {0:e}")]
    CyclicViolation(f64),
    #[error("B is not invertible: |det| = {det:e} at {point:?}")]
    SingularB { det: f64, point: Vec<f64> },
    #[error("B is singular in odd dimension {0}; the symplectic side needs an even dimension")]
    OddDimension(usize),
    #[error("bivector is not twisted Poisson: max residual {0:e}")]
    NotTwistedPoisson(f64),
    #[error("not a quadratic Lie algebra: {0}")]
    NotQuadraticLie(String),
    #[error("not a maximal positive subspace: {0}")]
    NotMaximalPositive(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = core::result::Result<T, Error>;
